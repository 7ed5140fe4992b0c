#ifndef PENCIL_REDUCE_HPP
#define PENCIL_REDUCE_HPP

#include "pencil/expr.hpp"

namespace pencil {

// ---------------------------------------------------------------------------
// Canonical first-order system equivalent to l_lambda[y] = m[f]:
//     (i/2) [ (Q x)' + S x' ] - H(t) x = W(t) F(t),
// with state dimension N = r d.  For the spectral parameter lambda the
// weight side W, F is evaluated with l-coefficients at conj(lambda).
// ---------------------------------------------------------------------------
struct CanonicalSystem {
  Pencil P;
  int r = 1, d = 1, N = 1, s = 0, n = 0;
  bool even = false;

  Mat Q(double t, cplx lam, int k = 0) const;  // k-th t-derivative
  Mat S(double t, cplx lam, int k = 0) const;
  Mat H(double t, cplx lam) const;
  Mat M0(double t, cplx lam) const;  // (i/2)(Q + S), multiplies x'

  // Weight of the canonical equation at spectral parameter lam,
  // i.e. W(t, l_{conj lam}, m).
  Mat W(double t, cplx lam) const;
  // Nevanlinna weight W(t, l_lam, -Im l_lam / Im lam) (must equal
  // Im H(t, lam)/Im lam by the reduction identity).
  Mat Wnev(double t, cplx lam) const;

  Mat G() const;  // Re Q(0) at a reference non-real lambda

  // Quasi-derivative change of basis (even r only):
  // C maps col{f^(0..n-1), f^(2n-1..n)} to col{f^(0..n-1), f^[2n-1..n](t|l)}.
  Mat Cmat(double t, cplx lam) const;

  // Phi: col{y^(0), ..., y^(r-1)} -> canonical state (without f-corrections).
  Mat liftMatrix(double t, cplx lam) const;
  // f-correction vector: state = Phi * yjet - corr.
  Vec liftCorrection(double t, const SmoothFn& f) const;
  Vec liftState(double t, cplx lam, const std::vector<Vec>& yjet,
                const SmoothFn* f = nullptr) const;
  // Inverse of liftState: derivatives y^(0..r-1) from the state.
  std::vector<Vec> recoverJet(double t, cplx lam, const Vec& state,
                              const SmoothFn* f = nullptr) const;

  // Right-hand side vector F(t, l_{conj lam}, m) (null slots set to zero).
  Vec Fvec(double t, cplx lam, const SmoothFn& f) const;
  // W(t) F(t) via the closed-form identity (quasi-derivatives of f only).
  Vec liftRhs(double t, cplx lam, const SmoothFn& f) const;
  // W(t) * Fvec(t) evaluated literally (cross-check path).
  Vec liftRhsNaive(double t, cplx lam, const SmoothFn& f) const;
};

CanonicalSystem buildCanonical(const Pencil& P);

// Generic weight matrix W(t, e, m) with e-coefficients evaluated at lamE.
Mat weightMatrix(const DiffExpr& e, cplx lamE, const DiffExpr& m, double t);

// Block matrix [m_ab] of the weight in quasi-derivative coordinates
// (the middle factor of W for even r; W itself for odd r).
Mat weightBlocks(const DiffExpr& m, int r, int d, double t, cplx lamE = cplx(0.0));

// Reduction identity Im H(t, l_lam) = Im(lam) * Wnev(t, lam) at samples.
CheckReport checkImHIdentity(const CanonicalSystem& sys,
                             const std::vector<double>& ts,
                             const std::vector<cplx>& lams);

// ODE right-hand sides (for the integrator):
// companion form z = (y, ..., y^(r-1)), z' = field(t, z) for l_lam[y] = m[f].
std::function<Vec(double, const Vec&)> companionField(const Pencil& P, cplx lam,
                                                      const SmoothFn* f = nullptr);
// canonical form x' = M0^{-1} [ H x - (i/2) Q' x + W F ].
std::function<Vec(double, const Vec&)> canonicalField(const CanonicalSystem& sys,
                                                      cplx lam,
                                                      const SmoothFn* f = nullptr);

}  // namespace pencil

#endif  // PENCIL_REDUCE_HPP
