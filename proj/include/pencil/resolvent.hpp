#ifndef PENCIL_RESOLVENT_HPP
#define PENCIL_RESOLVENT_HPP

#include "pencil/charop.hpp"

namespace pencil {

using JetFn = std::function<std::vector<Vec>(double)>;  // t -> (u, u', ...)

// m[u, v] over (a, b) for jet providers (quadrature of the Dirichlet density).
cplx mFormJets(const DiffExpr& m, const JetFn& u, const JetFn& v, double a,
               double b, int nseg = 64);
JetFn jetOf(const SmoothFn& f, int K);

// ---------------------------------------------------------------------------
// Resolvent R(lambda) on a window (a, b), defined by the kernel
//   K(t, s, lam) = X_lam(t) { M(lam) - (1/2) sgn(s-t)(iG)^{-1} } X_{conj lam}(s)^*.
// ---------------------------------------------------------------------------
struct ResolventApplication {
  cplx lam;
  double a = 0.0, b = 0.0;
  std::function<Vec(double)> state;  // canonical state x(t)
  JetFn jet;                         // y^(0..r-1)(t), f-corrections included
  std::function<Vec(double)> y1;     // first component R(lam)f
};

class ResolventOp {
 public:
  ResolventOp(CanonicalSystem sys, CharacteristicOperator co, double a,
              double b, int nseg = 96);

  const CanonicalSystem& sys() const { return sys_; }
  const CharacteristicOperator& co() const { return co_; }
  double a() const { return a_; }
  double b() const { return b_; }

  Mat kernel(double t, double s, cplx lam) const;
  ResolventApplication apply(const SmoothFn& f, cplx lam) const;

  // L^2_m norm of an application over the window.
  double normM(const ResolventApplication& app) const;
  cplx mInner(const ResolventApplication& app, const SmoothFn& g) const;

 private:
  CanonicalSystem sys_;
  CharacteristicOperator co_;
  double a_, b_;
  int nseg_;
};

// Residual of the canonical equation at interior collocation points,
// relative to 1 + max right-hand-side norm.
CheckReport checkResidual(const ResolventOp& R,
                          const ResolventApplication& app, const SmoothFn& f,
                          int npts = 20);

// Adjointness m[R(lam) f, g] = m[f, R(conj lam) g].
CheckReport checkAdjointPair(const ResolventOp& R, const SmoothFn& f,
                             const SmoothFn& g, cplx lam);

// Dissipativity ||R f||_m^2 <= Im m[R f, f] / Im lam (+ slack).
CheckReport checkDissipativity(const ResolventOp& R, const SmoothFn& f,
                               cplx lam);

// Kernel jump across s = t: K(t,t+0) - K(t,t-0) = -X(t)(iG)^{-1}X_conj(t)^*.
CheckReport checkKernelJump(const ResolventOp& R, cplx lam,
                            const std::vector<double>& ts);

// Discrete Cauchy mean-value test of lam -> m[R(lam)f, g] on a small circle.
CheckReport holomorphyProbe(const ResolventOp& R, const SmoothFn& f,
                            const SmoothFn& g, cplx lam0, double rho = 0.1,
                            int npts = 8);

// Energy-flux inequality at window ends: with U[x](t) = Re (ReQ(t)x(t), x(t)),
// Im lam * (U(beta) - U(alpha)) <= slack for expanding windows containing
// supp f.
CheckReport checkCoInequality(const ResolventOp& R, const SmoothFn& f,
                              cplx lam,
                              const std::vector<std::pair<double, double>>& windows);

// Boundary-value solve for a pair: builds the boundary characteristic
// operator, applies the resolvent, and certifies x(a) = Mb h, x(b) = Nb h in
// least squares.
struct BvpSolution {
  ResolventApplication app;
  Vec h;
  double boundaryResidual = 0.0;
  double normM = 0.0;  // ||R f||_m over the window
};
BvpSolution solveBvp(const CanonicalSystem& sys, const BoundaryPair& bp,
                     const SmoothFn& f, cplx lam, int nseg = 96);

}  // namespace pencil

#endif  // PENCIL_RESOLVENT_HPP
