#ifndef PENCIL_SPECTRAL_HPP
#define PENCIL_SPECTRAL_HPP

#include "pencil/resolvent.hpp"

namespace pencil {

// ---------------------------------------------------------------------------
// Spectral densities.
// ---------------------------------------------------------------------------
struct DensitySample {
  double mu = 0.0;
  Mat sigmaPrime;
  bool resolved = true;
  std::string note;
};

struct Jump {
  double mu0 = 0.0;
  Mat J;
};

struct SpectralDensity {
  std::vector<DensitySample> samples;
  std::vector<Jump> jumps;
  std::string method;
};

struct EpsLadder {
  double eps0 = 8e-3;
  int rungs = 6;  // halving; smallest eps = eps0 / 2^(rungs-1)
};

// sigma'(mu) ~ (1/pi) Im M(mu + i eps), Richardson-extrapolated over the
// ladder (the boundary value is attained linearly in eps for AC spectrum).
Mat densityStieltjesAt(const std::function<Mat(cplx)>& M, double mu,
                       const EpsLadder& lad = {});

// Point-mass residue: J = lim eps * Im M(mu0 + i eps).  Returns true when the
// limit stabilizes above `thresh` (a jump is present).
bool detectJump(const std::function<Mat(cplx)>& M, double mu0, Mat& Jout,
                const EpsLadder& lad = {}, double thresh = 1e-4);

SpectralDensity densityStieltjes(const std::function<Mat(cplx)>& M,
                                 const std::vector<double>& grid,
                                 const EpsLadder& lad = {},
                                 double jumpThresh = 1e-4);

// Closed-form periodic density at real mu (Floquet route):
//   sigma'(mu) = (1/2 pi) G^{-1} (Q-^* G Q- - Q+^* G Q+) G^{-1},
// Q+- = q+-(P+ + P-)^{-1}, q+- the projections onto unit-circle multiplicators
// of X_mu(+-T) that move inside the disk as mu -> mu + i eps.
Mat densityPeriodicAt(const CanonicalSystem& sys, double mu, double Tplus,
                      double Tminus, double eps = 1e-6, double edgeTol = 1e-4);

// ---------------------------------------------------------------------------
// Transforms phi(mu, f).
// ---------------------------------------------------------------------------
// Variant 1 (compactly supported f): int ([X_mu]_1)^* m[f] dt.
Vec transformV1(const CanonicalSystem& sys, const SmoothFn& f, double mu,
                double fa, double fb, int nseg = 64);
// Variant 2: int X_mu^* W(t, l_mu, m) F(t, l_mu, m) dt.
Vec transformV2(const CanonicalSystem& sys, const SmoothFn& f, double mu,
                double fa, double fb, int nseg = 64);

// ---------------------------------------------------------------------------
// Partial expansions and Parseval/Bessel.
// ---------------------------------------------------------------------------
// Quadrature breakpoints graded dyadically into the listed edge points
// (integrable 1/sqrt singularities of band-edge densities).
std::vector<double> gradedBreaks(double a, double b,
                                 const std::vector<double>& edges,
                                 int baseSeg = 8, int levels = 12);

// Absolutely continuous part of E_{alpha,beta} f at the t-points:
//   int_alpha^beta [X_mu(t)]_1 sigma'(mu) phi(mu, f) dmu
// over the given mu-breakpoints (which must cover [alpha, beta]).
std::vector<Vec> expansionAC(const CanonicalSystem& sys,
                             const std::function<Mat(double)>& sigmaPrime,
                             const SmoothFn& f, double fa, double fb,
                             const std::vector<double>& muBreaks,
                             const std::vector<double>& ts, int nsegT = 64);

// Jump atom E({mu0}) f via the residue limit -i eps R(mu0 + i eps) f,
// Richardson-extrapolated over eps and eps/2.
struct JumpAtom {
  std::function<Vec(double)> y1;
  JetFn jet;
};
JumpAtom jumpAtom(const ResolventOp& R, const SmoothFn& f, double mu0,
                  double eps = 1e-4);

struct ParsevalReport {
  double lhs = 0.0;          // m[f, f]
  double rhs = 0.0;          // int (d sigma phi, phi) + jump contributions
  double besselSlack = 0.0;  // lhs - rhs (Bessel requires >= -tol)
  double parsevalRel = 0.0;  // |lhs - rhs| / max(lhs, tiny)
};
ParsevalReport parsevalBessel(const CanonicalSystem& sys,
                              const std::function<Mat(double)>& sigmaPrime,
                              const SmoothFn& f, double fa, double fb,
                              const std::vector<double>& muBreaks,
                              double jumpContrib = 0.0, int nsegT = 64);

}  // namespace pencil

#endif  // PENCIL_SPECTRAL_HPP
