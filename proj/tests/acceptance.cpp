// One line per acceptance criterion; exit status is the number of failures.
#include <cstdio>

#include "fatou/acceptance.hpp"

int main() {
  int failed = 0;
  for (const auto& r : fatou::acceptance::run_all(fatou::acceptance::Config{})) {
    std::printf("%s %d %s: %s\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(), r.detail.c_str());
    std::fflush(stdout);
    failed += r.pass ? 0 : 1;
  }
  std::printf("%d failed\n", failed);
  return failed;
}
