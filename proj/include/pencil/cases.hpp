#ifndef PENCIL_CASES_HPP
#define PENCIL_CASES_HPP

#include "pencil/spectral.hpp"

namespace pencil {

// ---------------------------------------------------------------------------
// Built-in reference problems with closed-form oracles.
// ---------------------------------------------------------------------------
struct ReferenceCase {
  std::string name;
  Pencil pencil;
  bool hasExactDensity = false;
  std::function<Mat(double)> exactDensity;  // N x N, zero outside bands
  std::vector<Jump> exactJumps;
  std::vector<std::pair<double, double>> expectedBands;  // finite edges only
  double period = 1.0;  // coefficient period (constant coefficients)
  std::string notes;
};

// Degenerate weight m[y] = -y'' + 2iy' + y with the null function e^{it}
// (|q|^2 = 4 p1 p0 makes the m-form a perfect square).
ReferenceCase example1NullCase();
SmoothFn example1NullFunction();    // e^{it}
SmoothFn example1NullPrimitive();   // t e^{it} (m-null form, nonzero m-norm pairing)

// l[y] = -y'' with the Example-1 weight on (0, 1), plus its two boundary
// pairs (the second is the Dirichlet pair annihilating every m-null f).
ReferenceCase example2();
BoundaryPair example2Pair1();
BoundaryPair example2Pair2();

// l_lam[y] = iy' - lam(-y''+y) + (h/lam) y; band (-sqrt(h+1/4), sqrt(h+1/4)).
ReferenceCase example3(double h);

// l_lam[y] = y'''' - lam(-y''+y) + (h/lam) y; bands [-sqrt(h), 0] and
// [mu*, infinity) with a fourfold stretch (mu*, sqrt(h)).
ReferenceCase example4(double h);
double example4MuStar(double h);  // nonnegative root of mu^2 - 4(h/mu - mu)

// 2x2 first-order system J y' - lam y + diag(h/lam, 0) y; spectral gap
// (-sqrt(h), sqrt(h)) with a single jump diag(0, sqrt(h)/2) at mu = 0.
ReferenceCase example5(double h);
// (E_{+0} - E_0) f (t) = diag(0, sqrt(h)/2) int e^{-sqrt(h)|t-s|} f(s) ds.
Vec example5JumpKernelApply(double h, const SmoothFn& f, double t, double a,
                            double b, int nseg = 128);

ReferenceCase caseByName(const std::string& name, double h);

}  // namespace pencil

#endif  // PENCIL_CASES_HPP
