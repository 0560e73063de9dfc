#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

#include "fatou/dynamics.hpp"

namespace fatou {

// Pixel (ix, iy) samples base + s u + t v, s and t at pixel centres of
// [s_min, s_max] x [t_min, t_max]; row iy = 0 is t_max.
struct RenderWindow {
  Point base, u, v;
  double s_min = -1.0, s_max = 1.0, t_min = -1.0, t_max = 1.0;
  std::size_t width = 64, height = 64;

  Point pixel(std::size_t ix, std::size_t iy) const {
    double s = s_min + (static_cast<double>(ix) + 0.5) * (s_max - s_min) / static_cast<double>(width);
    double t = t_max - (static_cast<double>(iy) + 0.5) * (t_max - t_min) / static_cast<double>(height);
    Point z = base;
    for (std::size_t i = 0; i < z.size(); ++i) z[i] += s * u[i] + t * v[i];
    return z;
  }
};

struct RenderResult {
  std::size_t width = 0, height = 0;
  std::vector<std::uint8_t> tag;     // 0 InBasin, 1 Escaping, 2 Undecided
  std::vector<std::uint32_t> steps;  // certification step
  std::size_t basin = 0, escaping = 0, undecided = 0;

  // 8-bit planes. Class: basin black, undecided mid grey, escaping white.
  // Time: escaping pixels from 255 (step 0) down to 64 (latest escape seen), others as in class.
  std::vector<std::uint8_t> class_plane() const {
    std::vector<std::uint8_t> out(tag.size());
    for (std::size_t i = 0; i < tag.size(); ++i) out[i] = tag[i] == 0 ? 0 : tag[i] == 1 ? 255 : 128;
    return out;
  }
  std::vector<std::uint8_t> time_plane() const {
    std::uint32_t latest = 0;
    for (std::size_t i = 0; i < tag.size(); ++i)
      if (tag[i] == 1) latest = std::max(latest, steps[i]);
    std::vector<std::uint8_t> out = class_plane();
    for (std::size_t i = 0; i < tag.size(); ++i)
      if (tag[i] == 1 && latest > 0)
        out[i] = static_cast<std::uint8_t>(255 - (191 * steps[i]) / latest);
    return out;
  }
};

// Each pixel is independent, so the grid does not depend on the thread count.
inline RenderResult render_basin(const AutoSequence& f, const RenderWindow& win, const FiltrationSpec& spec,
                                 double rTilde, std::size_t maxiter, unsigned threads = 0) {
  const std::size_t k = static_cast<std::size_t>(f.dim());
  if (win.base.size() != k || win.u.size() != k || win.v.size() != k) throw parameter_error("render window dimension mismatch");
  if (win.width == 0 || win.height == 0) throw parameter_error("render resolution must be positive");
  if (!(rTilde > 0.0) || !(rTilde < spec.R)) throw parameter_error("need 0 < rTilde < R");
  for (std::size_t n = 1; n <= maxiter; ++n) (void)f.at(n);  // materialize before fanning out

  RenderResult r;
  r.width = win.width;
  r.height = win.height;
  r.tag.assign(win.width * win.height, 2);
  r.steps.assign(win.width * win.height, 0);
  const unsigned T = resolve_threads(threads);
  std::atomic<std::size_t> next_row{0};
  auto work = [&] {
    for (std::size_t iy; (iy = next_row.fetch_add(1)) < win.height;)
      for (std::size_t ix = 0; ix < win.width; ++ix) {
        Classification c = classify_point(f, win.pixel(ix, iy), spec, rTilde, maxiter);
        std::size_t at = iy * win.width + ix;
        r.tag[at] = c.tag == ClassTag::in_basin ? 0 : c.tag == ClassTag::escaping ? 1 : 2;
        r.steps[at] = static_cast<std::uint32_t>(c.n);
      }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < T; ++t) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  for (auto t : r.tag) (t == 0 ? r.basin : t == 1 ? r.escaping : r.undecided)++;
  return r;
}

}  // namespace fatou
