// Solve the conjugation problem for a random planar sequence, evaluate the basin chart at one
// point, then estimate the Green function of a perturbed weak-shift family in dimension 3.
#include <cstdio>

#include "fatou/fatou.hpp"

using namespace fatou;

int main() {
  TriangularFamilyParams p;
  p.k = 2;
  p.bounds = {0.3, 0.6, 0.1};
  p.seed = 7;
  AutoSequence f = random_triangular_sequence(p);
  int k0 = least_k0(p.bounds.A, p.bounds.B);
  ConjugationSolution sol = solve_conjugation(f, k0, {1e-10, 32});
  std::printf("k0 = %d, max residual %.3e\n", k0, sol.max_residual);

  Point z{cplx(0.05, 0.02), cplx(-0.03, 0.0)};
  ChartEstimate c = basin_chart_estimate(f, sol, z, 1e-3, 200);
  std::printf("chart(z) = (%.6f%+.6fi, %.6f%+.6fi) at n = %zu\n", c.value[0].real(), c.value[0].imag(),
              c.value[1].real(), c.value[1].imag(), c.n);

  PerturbedFamily fam = perturb(random_weak_shift_family(3, 2, 0.2, 0.5, 0.3, 11), 4);
  FiltrationSpec spec = find_filtration_spec(fam);
  AutoSequence seq = fam.sequence();
  for (double r : {0.5, 2.0, 8.0}) {
    Point w{cplx(r, 0.0), cplx(0.0, r), cplx(r, r)};
    GreenEstimate g = green_estimate(seq, w, spec, {});
    std::printf("G(%.1f, %.1fi, %.1f%+.1fi) = %.9f after %zu steps\n", r, r, r, r, g.value, g.n_used);
  }
  return 0;
}
