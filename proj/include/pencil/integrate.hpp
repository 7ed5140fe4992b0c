#ifndef PENCIL_INTEGRATE_HPP
#define PENCIL_INTEGRATE_HPP

#include <array>

#include "pencil/reduce.hpp"

namespace pencil {

// ---------------------------------------------------------------------------
// Dormand-Prince 5(4) with continuous (dense) output.
// ---------------------------------------------------------------------------
struct OdeStep {
  double t0 = 0.0, h = 0.0;
  std::array<Vec, 5> rcont;  // quartic Hermite-type interpolation data
  Vec eval(double t) const;
};

struct OdeSolution {
  double ta = 0.0, tb = 0.0;  // tb may be < ta (backward integration)
  Vec y0, yend;
  std::vector<OdeStep> steps;
  long nsteps = 0, nrejected = 0;

  double dir() const { return tb >= ta ? 1.0 : -1.0; }
  bool covers(double t) const {
    double lo = std::min(ta, tb), hi = std::max(ta, tb);
    return t >= lo - 1e-12 && t <= hi + 1e-12;
  }
  Vec eval(double t) const;
};

using OdeField = std::function<Vec(double, const Vec&)>;

OdeSolution odeSolve(const OdeField& f, double t0, double t1, const Vec& y0,
                     double rtol = 1e-10, double atol = 1e-12);

// Continue an existing solution to tNew (same field), appending steps.
void odeExtend(OdeSolution& sol, const OdeField& f, double tNew,
               double rtol = 1e-10, double atol = 1e-12);

// ---------------------------------------------------------------------------
// Fundamental solution X(t) of x' = A(t) x, X(t0) = I, with lazy extension in
// both directions.
// ---------------------------------------------------------------------------
struct FundamentalSolution {
  int N = 0;
  double t0 = 0.0;
  std::function<Mat(double)> A;
  double rtol = 1e-10, atol = 1e-12;

  Mat operator()(double t);  // extends the stored solution as needed

 private:
  OdeSolution fwd_, bwd_;
  bool hasFwd_ = false, hasBwd_ = false;
  OdeField field_() const;
};

// A(t) = M0^{-1} (H - (i/2) Q') for the homogeneous canonical system at lam.
std::function<Mat(double)> canonicalMatrixField(const CanonicalSystem& sys,
                                                cplx lam);

FundamentalSolution fundamentalSolution(const CanonicalSystem& sys, cplx lam,
                                        double t0 = 0.0, double rtol = 1e-10,
                                        double atol = 1e-12);

// m-Gram of the solution columns at parameter lamSol:
//   Delta = int_a^b X(s)^* W(s, l_{lamSol}, m) X(s) ds.
Mat gramMatrix(const CanonicalSystem& sys, FundamentalSolution& X, cplx lamSol,
               double a, double b, int nseg = 64);

// Monodromy over [t0, t0 + T]: X(t0 + T) for X(t0) = I.
Mat monodromy(const CanonicalSystem& sys, cplx lam, double t0, double T,
              double rtol = 1e-10, double atol = 1e-12);

// When the canonical field is t-constant on [t0, t0+T], fills A = V diag(d)
// V^{-1} and returns true; the monodromy exponents are then d * T without ever
// assembling an (possibly overflowing) exponential.  Returns false for
// genuinely t-dependent coefficients.
bool constantFieldEigen(const CanonicalSystem& sys, cplx lam, double t0,
                        double T, Mat& V, Eigen::VectorXcd& d);

// Definiteness of the problem on [a, b] at lam: the m-Gram of a solution basis
// has full rank iff no nontrivial solution of l_lam[y] = 0 is m-null.
struct DefinitenessReport {
  bool definite = false;
  double minEig = 0.0;
  int rank = 0;
  int N = 0;
};
DefinitenessReport checkDefiniteness(const CanonicalSystem& sys, cplx lam,
                                     double a, double b, int nseg = 64);

}  // namespace pencil

#endif  // PENCIL_INTEGRATE_HPP
