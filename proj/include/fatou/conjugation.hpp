#pragma once

// Degree-by-degree solution of h_{n+1} = [g_n o h_n o f_n^{-1}]_{k0} for a
// lower-triangular attracting sequence f_n, with h_n tangent to the identity
// and g_n in the normal form for its dimension:
//   k = 2:  g = (a x + p(y + q(x)/c), c y + q(x)), p and q monic of degree k0
//   k >= 3: g = T^k o ... o T^1, T^i(z) = (..., u_ii z_i + P^i(z), ...), P^i free of z_i
//
// Within a degree every coefficient is affine in the unknowns of that degree.
// Unknowns come in two kinds:
//   alpha-slots  (coefficients of g, h has nothing there): 0 = kappa_n alpha_n + gamma_n
//   rho-slots    (coefficients of h):                       rho_{n+1} = beta_n rho_n + gamma_n
// with |beta_n| > 1, so each rho-slot has one bounded solution.
// Slots are visited lexicographically per coordinate, coordinates in order; the
// operator is then triangular, which every column asserts as it is built.

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fatou/affine_orbit.hpp"
#include "fatou/automorphism.hpp"
#include "fatou/germ.hpp"
#include "fatou/jet.hpp"
#include "fatou/maps.hpp"
#include "fatou/sequence.hpp"

namespace fatou {

enum class SlotKind { alpha, rho };

struct Slot {
  int coord = 1;  // 1-based
  MultiIndex m;
  SlotKind kind = SlotKind::rho;
  bool alpha_fixed = false;  // planar top degree, alpha = 1
};

struct CoefficientTable {
  std::vector<Slot> slots;
  std::vector<std::vector<cplx>> alpha;  // alpha[s][n-1]
  std::vector<std::vector<cplx>> rho;    // rho[s][n-1]

  std::optional<std::size_t> find(int coord, const MultiIndex& m) const {
    for (std::size_t s = 0; s < slots.size(); ++s)
      if (slots[s].coord == coord && slots[s].m == m) return s;
    return std::nullopt;
  }
};

struct ConjugationOptions {
  double tol = 1e-9;
  std::size_t horizon = 32;
};

struct ConjugationSolution {
  int k = 0;
  int k0 = 0;
  std::size_t horizon = 0;  // relations hold for n = 1..horizon (and beyond, up to window - 1)
  std::size_t window = 0;   // coefficients exist for n = 1..window
  std::size_t tail = 0;
  CoefficientTable table;
  std::vector<GermMap> h;                     // h[n-1]
  std::vector<HenonProduct> planar;           // k == 2
  std::vector<TriangularProduct> triangular;  // k >= 3

  double max_residual = 0.0;
  std::vector<double> degree_residuals;  // index = degree
  double bound_constant = 0.0;           // sup |alpha|, |rho| over n <= horizon
  double expansion_inf = 0.0;            // inf |beta| over rho-slots
  double drive_sup = 0.0;                // sup |beta|, |gamma|
  double tail_bound = 0.0;
  std::vector<int> zero_top_coords;      // k >= 3: i with P^i free of degree-k0 terms for n <= horizon

  const GermMap& h_at(std::size_t n) const {
    if (n < 1 || n > h.size()) throw parameter_error("h index outside the solved window");
    return h[n - 1];
  }

  Automorphism g(std::size_t n) const {
    if (n < 1 || n > window) throw parameter_error("g index outside the solved window");
    return k == 2 ? planar[n - 1].to_automorphism() : triangular[n - 1].to_automorphism();
  }

  AutoSequence g_sequence() const {
    auto self = std::make_shared<ConjugationSolution>(*this);
    return {k, [self](std::size_t n) { return self->g(n); }};
  }
};

namespace detail {

inline bool is_lower_triangular(const Matrix& U, double rel) {
  double scale = std::max(1.0, U.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < U.rows(); ++i)
    for (Eigen::Index j = i + 1; j < U.cols(); ++j)
      if (std::abs(U(i, j)) > rel * scale) return false;
  return true;
}

// DT^i for the current linear coefficients of P^i.
inline Matrix elementary_linear(int k, int i, cplx uii, const Jet& Pi, const JetSpace& sp) {
  Matrix M = Matrix::Identity(k, k);
  for (int j = 1; j <= k; ++j) M(i - 1, j - 1) = j == i ? uii : Pi[sp.index(MultiIndex::unit(k, j))];
  return M;
}

inline std::vector<Slot> degree_slots(int k, int D, int k0) {
  std::vector<Slot> out;
  for (int i = 1; i <= k; ++i) {
    // zero-prefix block first, then the phi ordering; together this is lexicographic.
    OrderedIndexSet order;
    if (i == 1) {
      order = homogeneous_indices(k, D);
    } else {
      for (auto& m : homogeneous_indices(k, D)) {
        bool zero = true;
        for (int l = 0; l < i - 1; ++l) zero = zero && m[l] == 0;
        if (zero) order.push_back(m);
      }
      auto phi = phi_ordering(k, D, i - 1);
      order.insert(order.end(), phi.begin(), phi.end());
    }
    for (const auto& m : order) {
      Slot s;
      s.coord = i;
      s.m = m;
      if (k == 2) {
        bool pure = (i == 1 && m[0] == 0) || (i == 2 && m[1] == 0);
        s.kind = pure && D < k0 ? SlotKind::alpha : SlotKind::rho;
        s.alpha_fixed = pure && D == k0;
      } else {
        s.kind = m[i - 1] == 0 ? SlotKind::alpha : SlotKind::rho;
      }
      out.push_back(s);
    }
  }
  return out;
}

}  // namespace detail

// Max coefficient gap of the germ relation over n = 1..N, also per degree.
inline double residual(const AutoSequence& f, const ConjugationSolution& sol, std::size_t N,
                       std::vector<double>* per_degree = nullptr) {
  if (N + 1 > sol.window) throw parameter_error("residual horizon exceeds the solved window");
  const int k0 = sol.k0;
  if (per_degree) per_degree->assign(static_cast<std::size_t>(k0 + 1), 0.0);
  double worst = 0.0;
  for (std::size_t n = 1; n <= N; ++n) {
    GermMap finv = f.at(n).inverse_germ(k0);
    GermMap rhs = compose_truncated(sol.g(n).germ(k0), compose_truncated(sol.h_at(n), finv, k0), k0);
    const GermMap& lhs = sol.h_at(n + 1);
    for (int i = 1; i <= sol.k; ++i) {
      const Polynomial diff = rhs[i] - lhs[i];
      for (const auto& [m, c] : diff.terms()) {
        double e = std::abs(c);
        worst = std::max(worst, e);
        if (per_degree && m.degree() <= k0) (*per_degree)[static_cast<std::size_t>(m.degree())] =
            std::max((*per_degree)[static_cast<std::size_t>(m.degree())], e);
      }
    }
  }
  return worst;
}

inline ConjugationSolution solve_conjugation(const AutoSequence& f, int k0, const ConjugationOptions& opt = {}) {
  const int k = f.dim();
  if (k < 2) throw parameter_error("conjugation needs k >= 2");
  if (k0 < 2) throw parameter_error("conjugation needs k0 >= 2");
  if (opt.horizon < 1) throw parameter_error("horizon must be >= 1");
  if (!(opt.tol > 0.0)) throw parameter_error("tol must be positive");
  if (f.bounds() && !(std::pow(f.bounds()->B, k0) < f.bounds()->A))
    throw hypothesis_error("B^k0 < A fails for the declared bounds");

  auto sp_ptr = JetSpace::get(k, k0);
  const JetSpace& sp = *sp_ptr;

  std::vector<Matrix> U, Ui;
  std::vector<std::vector<Jet>> finv;
  auto load = [&](std::size_t upto) {
    for (std::size_t n = U.size() + 1; n <= upto; ++n) {
      const Automorphism& fn = f.at(n);
      Matrix D = fn.linear_part();
      if (!detail::is_lower_triangular(D, 1e-12))
        throw parameter_error("linear part of f_" + std::to_string(n) + " is not lower triangular; normalize first");
      D = D.triangularView<Eigen::Lower>();
      for (int i = 0; i < k; ++i)
        if (D(i, i) == cplx{}) throw domain_error("singular linear part at n = " + std::to_string(n));
      U.push_back(D);
      Ui.push_back(D.triangularView<Eigen::Lower>().solve(Matrix::Identity(k, k)));
      finv.push_back(to_jets(sp, fn.inverse_germ(k0)));
    }
  };

  auto u = [&](std::size_t idx, int i) { return U[idx](i - 1, i - 1); };
  // beta for the rho-slot (i, m): u_ii prod_j u_jj^{-m_j}
  auto beta_closed = [&](std::size_t idx, const Slot& s) {
    cplx b = u(idx, s.coord);
    for (int j = 1; j <= k; ++j) b *= std::pow(u(idx, j), -s.m[j - 1]);
    return b;
  };

  // Window: the tail must shrink the influence of the terminal value below tol.
  std::vector<std::vector<Slot>> slots(static_cast<std::size_t>(k0 + 1));
  for (int D = 2; D <= k0; ++D) slots[static_cast<std::size_t>(D)] = detail::degree_slots(k, D, k0);
  double c_inf = std::numeric_limits<double>::infinity(), C_sup = 1.0;
  std::size_t scanned = 0;
  auto scan = [&](std::size_t upto) {
    load(upto);
    for (std::size_t idx = scanned; idx < upto; ++idx)
      for (int D = 2; D <= k0; ++D)
        for (const auto& s : slots[static_cast<std::size_t>(D)]) {
          if (s.kind != SlotKind::rho) continue;
          double b = std::abs(beta_closed(idx, s));
          if (!(b > 1.0))
            throw hypothesis_error("rho-slot " + std::to_string(s.coord) + s.m.to_string() + " is not expanding at n = " +
                                   std::to_string(idx + 1) + " (|beta| = " + std::to_string(b) + ")");
          c_inf = std::min(c_inf, b);
          C_sup = std::max(C_sup, b);
        }
    scanned = std::max(scanned, upto);
  };
  const std::size_t N = opt.horizon;
  scan(N + 1);
  std::size_t T = affine_tail_length(C_sup, c_inf, opt.tol);
  for (int guard = 0; guard < 64; ++guard) {
    scan(N + T + 1);
    std::size_t T2 = affine_tail_length(C_sup, c_inf, opt.tol);
    if (T2 <= T) break;
    T = T2;
  }
  const std::size_t W = N + T + 1;
  load(W);

  // State.
  std::vector<std::vector<Jet>> H(W, to_jets(sp, GermMap::identity(k, k0)));
  std::vector<std::vector<cplx>> pco, qco;    // k == 2
  std::vector<std::vector<Jet>> Pj;           // k >= 3
  if (k == 2) {
    pco.assign(W, std::vector<cplx>(static_cast<std::size_t>(k0 + 1)));
    qco.assign(W, std::vector<cplx>(static_cast<std::size_t>(k0 + 1)));
    for (std::size_t idx = 0; idx < W; ++idx) qco[idx][1] = U[idx](1, 0);
  } else {
    Pj.assign(W, std::vector<Jet>(static_cast<std::size_t>(k), sp.zero()));
    for (std::size_t idx = 0; idx < W; ++idx) {
      // row_i(U) = u_ii e_i + sum_{j<i} alpha^i_j row_j(U), forward substitution
      for (int i = 2; i <= k; ++i) {
        Matrix A = U[idx].topLeftCorner(i - 1, i - 1).transpose();
        Vector rhs = U[idx].block(i - 1, 0, 1, i - 1).transpose();
        Vector al = A.triangularView<Eigen::Upper>().solve(rhs);
        for (int j = 1; j < i; ++j) Pj[idx][static_cast<std::size_t>(i - 1)][sp.index(MultiIndex::unit(k, j))] = al(j - 1);
      }
    }
  }

  auto make_planar = [&](std::size_t idx) {
    Polynomial p(1, k0), q(1, k0);
    for (int j = 1; j <= k0; ++j) {
      p.set(MultiIndex{j}, pco[idx][static_cast<std::size_t>(j)]);
      q.set(MultiIndex{j}, qco[idx][static_cast<std::size_t>(j)]);
    }
    return HenonProduct{U[idx](0, 0), U[idx](1, 1), p, q};
  };
  auto make_triangular = [&](std::size_t idx) {
    TriangularProduct g;
    g.k = k;
    for (int i = 1; i <= k; ++i) {
      g.u.push_back(u(idx, i));
      g.P.push_back(from_jet(sp, Pj[idx][static_cast<std::size_t>(i - 1)], 0.0));
    }
    return g;
  };
  auto g_jets = [&](std::size_t idx) {
    Automorphism g = k == 2 ? make_planar(idx).to_automorphism() : make_triangular(idx).to_automorphism();
    return to_jets(sp, g.germ(k0));
  };

  ConjugationSolution sol;
  sol.k = k;
  sol.k0 = k0;
  sol.horizon = N;
  sol.window = W;
  sol.tail = T;
  double gamma_sup = 0.0;

  for (int D = 2; D <= k0; ++D) {
    if (k == 2 && D == k0)
      for (std::size_t idx = 0; idx < W; ++idx) pco[idx][static_cast<std::size_t>(k0)] = qco[idx][static_cast<std::size_t>(k0)] = 1.0;

    // Right-hand side with this degree's unknowns at zero.
    std::vector<std::vector<Jet>> acc(W);
    for (std::size_t idx = 0; idx < W; ++idx) {
      auto rhs = jet_compose(sp, g_jets(idx), jet_compose(sp, H[idx], finv[idx]));
      for (auto& c : rhs) c = degree_part(sp, c, D);
      acc[idx] = std::move(rhs);
    }

    const auto& ds = slots[static_cast<std::size_t>(D)];
    for (std::size_t si = 0; si < ds.size(); ++si) {
      const Slot& s = ds[si];
      const int i = s.coord;
      const std::size_t mi = sp.index(s.m);
      std::vector<std::vector<Jet>> cols(W);
      std::vector<cplx> diag(W);
      for (std::size_t idx = 0; idx < W; ++idx) {
        Vector v;
        Matrix rows;
        cplx closed;
        if (s.kind == SlotKind::rho) {
          v = U[idx].col(i - 1);
          rows = Ui[idx];
          closed = beta_closed(idx, s);
        } else if (k == 2) {
          v = Vector::Zero(2);
          v(i - 1) = 1.0;
          if (i == 1) {
            Matrix Mt = Matrix::Identity(2, 2);
            Mt(1, 0) = U[idx](1, 0) / U[idx](1, 1);
            rows = Mt * Ui[idx];
            closed = std::pow(U[idx](1, 1), -s.m[1]);
          } else {
            rows = Ui[idx];
            closed = std::pow(U[idx](0, 0), -s.m[0]);
          }
        } else {
          Matrix Lless = Matrix::Identity(k, k), Lgreater = Matrix::Identity(k, k);
          for (int j = 1; j < i; ++j)
            Lless = detail::elementary_linear(k, j, u(idx, j), Pj[idx][static_cast<std::size_t>(j - 1)], sp) * Lless;
          for (int j = i + 1; j <= k; ++j)
            Lgreater = detail::elementary_linear(k, j, u(idx, j), Pj[idx][static_cast<std::size_t>(j - 1)], sp) * Lgreater;
          v = Lgreater.col(i - 1);
          rows = Lless * Ui[idx];
          closed = 1.0;
          for (int j = i + 1; j <= k; ++j) closed *= std::pow(u(idx, j), -s.m[j - 1]);
        }
        Jet mono = linear_monomial(sp, rows, s.m);
        std::vector<Jet> col(static_cast<std::size_t>(k), sp.zero());
        double scale = 0.0;
        for (int c = 0; c < k; ++c) {
          if (v(c) == cplx{}) continue;
          for (std::size_t t = sp.begin(D); t < sp.begin(D + 1); ++t) {
            col[static_cast<std::size_t>(c)][t] = v(c) * mono[t];
            scale = std::max(scale, std::abs(col[static_cast<std::size_t>(c)][t]));
          }
        }
        diag[idx] = col[static_cast<std::size_t>(i - 1)][mi];
        if (std::abs(diag[idx] - closed) > 1e-8 * std::max(1.0, std::abs(closed)))
          throw std::logic_error("slot factor mismatch at " + std::to_string(i) + s.m.to_string());
        for (std::size_t prev = 0; prev < si; ++prev) {
          const Slot& ps = ds[prev];
          if (std::abs(col[static_cast<std::size_t>(ps.coord - 1)][sp.index(ps.m)]) > 1e-10 * std::max(1.0, scale))
            throw std::logic_error("slot order violates the triangular dependency at " + std::to_string(i) + s.m.to_string());
        }
        cols[idx] = std::move(col);
      }

      std::vector<cplx> x(W);
      if (s.kind == SlotKind::alpha) {
        for (std::size_t idx = 0; idx < W; ++idx) {
          cplx g = acc[idx][static_cast<std::size_t>(i - 1)][mi];
          gamma_sup = std::max(gamma_sup, std::abs(g));
          x[idx] = -g / diag[idx];
        }
      } else {
        std::vector<cplx> b(W - 1), g(W - 1);
        for (std::size_t idx = 0; idx + 1 < W; ++idx) {
          b[idx] = diag[idx];
          g[idx] = acc[idx][static_cast<std::size_t>(i - 1)][mi];
          gamma_sup = std::max(gamma_sup, std::abs(g[idx]));
        }
        x = backward_orbit(b, g);
      }
      for (std::size_t idx = 0; idx < W; ++idx) {
        if (!std::isfinite(x[idx].real()) || !std::isfinite(x[idx].imag()))
          throw convergence_error("non-finite coefficient", {"degree=" + std::to_string(D), "coord=" + std::to_string(i),
                                                             "index=" + s.m.to_string(), "n=" + std::to_string(idx + 1)});
        const cplx xv = x[idx];
        if (xv == cplx{}) continue;
        for (int c = 0; c < k; ++c)
          for (std::size_t t = sp.begin(D); t < sp.begin(D + 1); ++t)
            acc[idx][static_cast<std::size_t>(c)][t] += xv * cols[idx][static_cast<std::size_t>(c)][t];
        if (s.kind == SlotKind::rho) {
          H[idx][static_cast<std::size_t>(i - 1)][mi] = xv;
        } else if (k == 2) {
          (i == 1 ? pco : qco)[idx][static_cast<std::size_t>(D)] = xv;
        } else {
          Pj[idx][static_cast<std::size_t>(i - 1)][mi] = xv;
        }
      }

      sol.table.slots.push_back(s);
      std::vector<cplx> al(W), rh(W);
      for (std::size_t idx = 0; idx < W; ++idx) {
        if (s.kind == SlotKind::rho) {
          rh[idx] = x[idx];
          if (s.alpha_fixed) al[idx] = 1.0;
        } else {
          al[idx] = x[idx];
        }
      }
      sol.table.alpha.push_back(std::move(al));
      sol.table.rho.push_back(std::move(rh));
    }
  }

  for (std::size_t idx = 0; idx < W; ++idx) {
    sol.h.push_back(from_jets(sp, H[idx]));
    if (k == 2) {
      sol.planar.push_back(make_planar(idx));
    } else {
      sol.triangular.push_back(make_triangular(idx));
    }
  }

  for (std::size_t s = 0; s < sol.table.slots.size(); ++s)
    for (std::size_t idx = 0; idx < N; ++idx) {
      if (!sol.table.slots[s].alpha_fixed) sol.bound_constant = std::max(sol.bound_constant, std::abs(sol.table.alpha[s][idx]));
      sol.bound_constant = std::max(sol.bound_constant, std::abs(sol.table.rho[s][idx]));
    }
  sol.expansion_inf = c_inf;
  sol.drive_sup = std::max(C_sup, gamma_sup);
  sol.tail_bound = sol.drive_sup * std::pow(c_inf, -static_cast<double>(T)) / (c_inf - 1.0);

  if (k >= 3) {
    for (int i = 1; i <= k; ++i) {
      bool zero = true;
      for (std::size_t idx = 0; idx < N && zero; ++idx)
        zero = sol.triangular[idx].P[static_cast<std::size_t>(i - 1)].homogeneous_part(k0).is_zero();
      if (zero) sol.zero_top_coords.push_back(i);
    }
  }

  sol.max_residual = residual(f, sol, N, &sol.degree_residuals);
  return sol;
}

struct ChartEstimate {
  Point value;
  std::size_t n = 0;     // first index with |f(n) z| < delta
  double cauchy = 0.0;   // |phi_n - phi_{n+1}|
};

// phi_n(z) = g(n)^{-1}(h_{n+1}(f(n) z)) at the first n with |f(n) z| < delta, where
// f(n) = f_n o ... o f_1 and g(n)^{-1} = g_1^{-1} o ... o g_n^{-1}.
inline ChartEstimate basin_chart_estimate(const AutoSequence& f, const ConjugationSolution& sol, const Point& z,
                                          double delta, std::size_t maxiter) {
  if (!(delta > 0.0)) throw parameter_error("delta must be positive");
  if (static_cast<int>(z.size()) != sol.k) throw parameter_error("point dimension mismatch");
  std::vector<Point> orb{z};
  std::size_t hit = 0;
  for (std::size_t n = 1; n <= maxiter; ++n) {
    Point w = f.at(n)(orb.back());
    if (!all_finite(w)) throw basin_error("orbit is not finite at n = " + std::to_string(n));
    orb.push_back(w);
    if (euclid_norm(w) < delta) {
      hit = n;
      break;
    }
  }
  if (hit == 0) throw basin_error("orbit did not enter B(0, delta) within maxiter");
  if (hit + 2 > sol.window) throw basin_error("orbit entered B(0, delta) beyond the solved window");
  orb.push_back(f.at(hit + 1)(orb.back()));
  auto chart = [&](std::size_t n) {
    Point w = sol.h_at(n + 1)(orb[n]);
    for (std::size_t j = n; j >= 1; --j) w = sol.g(j).inverse(w);
    return w;
  };
  ChartEstimate out;
  out.n = hit;
  out.value = chart(hit);
  Point next = chart(hit + 1);
  double d = 0.0;
  for (std::size_t i = 0; i < next.size(); ++i) d += std::norm(next[i] - out.value[i]);
  out.cauchy = std::sqrt(d);
  return out;
}

}  // namespace fatou
