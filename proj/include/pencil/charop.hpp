#ifndef PENCIL_CHAROP_HPP
#define PENCIL_CHAROP_HPP

#include "pencil/integrate.hpp"

namespace pencil {

// ---------------------------------------------------------------------------
// Boundary pair (Mb, Nb) prescribing lambda-dependent conditions
// x(a) = Mb(lambda) h, x(b) = Nb(lambda) h on the canonical state.
// ---------------------------------------------------------------------------
struct BoundaryPair {
  double a = 0.0, b = 1.0;
  std::function<Mat(cplx)> Mb, Nb;

  static BoundaryPair constant(double a, double b, const Mat& M, const Mat& N);
};

struct BoundaryPairReport {
  CheckReport balance;       // Mb(conj lam)^* ReQ(a) Mb(lam) = Nb(conj lam)^* ReQ(b) Nb(lam)
  CheckReport jointKernel;   // rank [Mb; Nb] = N
  CheckReport semidefinite;  // Im lam * (Nb^* ReQ(b) Nb - Mb^* ReQ(a) Mb) <= 0
  bool pass() const {
    return balance.pass && jointKernel.pass && semidefinite.pass;
  }
};
BoundaryPairReport checkBoundaryPair(const CanonicalSystem& sys,
                                     const BoundaryPair& bp,
                                     const std::vector<cplx>& lams);

// ---------------------------------------------------------------------------
// Characteristic operator: the matrix parameter M(lambda) of the resolvent
// kernel X_lam(t) { M(lam) - (1/2) sgn(s-t) (iG)^{-1} } X_{conj lam}(s)^*,
// with fundamental solutions normalized at t0.
// ---------------------------------------------------------------------------
struct CharacteristicOperator {
  std::function<Mat(cplx)> M;
  Mat G;
  double t0 = 0.0;
  std::string provenance;  // "boundary" | "periodic" | "user"
};

struct RieszData {
  Mat Pplus, Pminus;  // spectral projections inside the unit disk
  Mat Pcal;           // Pplus (Pplus + Pminus)^{-1}
};

// Spectral projection of A onto eigenvalues inside the unit circle.
// Eigendecomposition route with a contour-quadrature fallback; throws if an
// eigenvalue lies within `edge` of the unit circle.
Mat rieszProjectionInside(const Mat& A, double edge = 1e-6);

// Finite-interval characteristic operator from a boundary pair:
//   M(lam) = -1/2 (Xa^{-1} Mb + Xb^{-1} Nb)(Xa^{-1} Mb - Xb^{-1} Nb)^{-1} (iG)^{-1}
// with X normalized at t0 = bp.a.
Mat coFromBoundary(const CanonicalSystem& sys, const BoundaryPair& bp, cplx lam);
CharacteristicOperator coBoundary(const CanonicalSystem& sys, BoundaryPair bp);

// Periodic characteristic operator M(lam) = (Pcal - 1/2 I)(iG)^{-1} from the
// Riesz projections of the monodromies X_lam(+Tplus), X_lam(-Tminus), t0 = 0.
Mat coPeriodic(const CanonicalSystem& sys, cplx lam, double Tplus,
               double Tminus, RieszData* data = nullptr);
CharacteristicOperator coPeriodicOp(const CanonicalSystem& sys, double Tplus,
                                    double Tminus);

// M(conj lam) = M(lam)^* at sampled lambda.
CheckReport checkCoSymmetry(const CharacteristicOperator& co,
                            const std::vector<cplx>& lams);

// Separated-condition certificate: Pcal(lam) = M(lam)(iG) + 1/2 I is a
// projection; reports worst ||Pcal^2 - Pcal||.
CheckReport checkProjectionSeparation(const CharacteristicOperator& co,
                                      const std::vector<cplx>& lams);

// Signature balance of G (necessary for self-adjoint-type separated
// conditions at a finite endpoint).
CheckReport checkInertiaBalance(const Mat& G);

}  // namespace pencil

#endif  // PENCIL_CHAROP_HPP
