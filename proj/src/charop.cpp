#include "pencil/charop.hpp"

namespace pencil {

BoundaryPair BoundaryPair::constant(double a, double b, const Mat& M,
                                    const Mat& N) {
  BoundaryPair bp;
  bp.a = a;
  bp.b = b;
  bp.Mb = [M](cplx) { return M; };
  bp.Nb = [N](cplx) { return N; };
  return bp;
}

BoundaryPairReport checkBoundaryPair(const CanonicalSystem& sys,
                                     const BoundaryPair& bp,
                                     const std::vector<cplx>& lams) {
  BoundaryPairReport rep;
  const int N = sys.N;
  for (cplx lam : lams) {
    Mat Qa = rePart(sys.Q(bp.a, lam));
    Mat Qb = rePart(sys.Q(bp.b, lam));
    Mat Mb = bp.Mb(lam), Nb = bp.Nb(lam);
    Mat Mbc = bp.Mb(std::conj(lam)), Nbc = bp.Nb(std::conj(lam));
    double bal = (Mbc.adjoint() * Qa * Mb - Nbc.adjoint() * Qb * Nb).norm();
    rep.balance.worst = std::max(rep.balance.worst, bal);
    Mat stacked(2 * N, N);
    stacked << Mb, Nb;
    if (numericalRank(stacked, 1e-10) < N) {
      rep.jointKernel.pass = false;
      rep.jointKernel.note = "joint kernel nontrivial";
    }
    double viol =
        maxEig(lam.imag() * (Nb.adjoint() * Qb * Nb - Mb.adjoint() * Qa * Mb));
    rep.semidefinite.worst = std::max(rep.semidefinite.worst, viol);
  }
  rep.balance.pass = rep.balance.worst <= 1e-8;
  rep.semidefinite.pass = rep.semidefinite.worst <= 1e-8;
  return rep;
}

Mat rieszProjectionInside(const Mat& A, double edge) {
  const int N = (int)A.rows();
  Eigen::ComplexEigenSolver<Mat> es(A);
  for (int i = 0; i < N; ++i) {
    double r = std::abs(es.eigenvalues()(i));
    if (std::abs(r - 1.0) < edge)
      throw std::runtime_error("rieszProjectionInside: eigenvalue on unit circle");
  }
  Mat V = es.eigenvectors();
  Mat D = Mat::Zero(N, N);
  for (int i = 0; i < N; ++i)
    if (std::abs(es.eigenvalues()(i)) < 1.0) D(i, i) = 1.0;
  Mat P = V * D * V.inverse();
  if ((P * P - P).norm() <= 1e-10 * (1.0 + P.norm())) return P;
  // Defective/ill-conditioned eigenbasis: contour quadrature of the resolvent
  // over the unit circle, doubling nodes until the projection is idempotent.
  for (int n = 256; n <= 8192; n *= 2) {
    Mat acc = Mat::Zero(N, N);
    for (int k = 0; k < n; ++k) {
      double th = 2.0 * M_PI * (k + 0.5) / n;
      cplx z = std::exp(I1 * th);
      // (1/2 pi i) * integral (zI - A)^{-1} dz, dz = i z dth
      acc += (z / double(n)) * (z * Mat::Identity(N, N) - A).inverse();
    }
    if ((acc * acc - acc).norm() <= 1e-10 * (1.0 + acc.norm())) return acc;
    P = acc;
  }
  return P;
}

Mat coFromBoundary(const CanonicalSystem& sys, const BoundaryPair& bp,
                   cplx lam) {
  auto X = fundamentalSolution(sys, lam, bp.a);
  Mat XbInv = X(bp.b).inverse();
  Mat Mb = bp.Mb(lam), Nb = bp.Nb(lam);
  Mat U = Mb + XbInv * Nb;   // Xa = I by normalization at t0 = a
  Mat V = Mb - XbInv * Nb;
  Eigen::FullPivLU<Mat> lu(V);
  if (lu.rcond() < 1e-12)
    throw std::runtime_error(
        "coFromBoundary: singular pivot (pair violates realization "
        "hypotheses at this lambda)");
  Mat G = rePart(sys.Q(bp.a, I1));
  return -0.5 * U * lu.inverse() * (I1 * G).inverse();
}

CharacteristicOperator coBoundary(const CanonicalSystem& sys, BoundaryPair bp) {
  CharacteristicOperator co;
  co.t0 = bp.a;
  co.G = rePart(sys.Q(bp.a, I1));
  co.provenance = "boundary";
  co.M = [sys, bp](cplx lam) { return coFromBoundary(sys, bp, lam); };
  return co;
}

Mat coPeriodic(const CanonicalSystem& sys, cplx lam, double Tplus,
               double Tminus, RieszData* data) {
  const int N = sys.N;
  Mat Pp, Pm;
  Mat V;
  Eigen::VectorXcd dv;
  if (constantFieldEigen(sys, lam, 0.0, std::max(Tplus, Tminus), V, dv)) {
    // exponent route: multiplicators exp(d T) never assembled, so huge real
    // exponents near excluded points cannot overflow
    Mat Vi = V.inverse();
    Mat Dp = Mat::Zero(N, N), Dm = Mat::Zero(N, N);
    for (int i = 0; i < N; ++i) {
      double x = dv(i).real();
      if (std::abs(x) * std::min(Tplus, Tminus) < 1e-9)
        throw std::runtime_error("coPeriodic: multiplicator on the unit circle");
      if (x < 0.0)
        Dp(i, i) = 1.0;  // |exp(d T+)| < 1
      else
        Dm(i, i) = 1.0;  // |exp(-d T-)| < 1
    }
    Pp = V * Dp * Vi;
    Pm = V * Dm * Vi;
  } else {
    Mat Ap = monodromy(sys, lam, 0.0, Tplus);
    Mat Am = monodromy(sys, lam, 0.0, -Tminus);
    Pp = rieszProjectionInside(Ap);
    Pm = rieszProjectionInside(Am);
  }
  Mat sum = Pp + Pm;
  Eigen::FullPivLU<Mat> lu(sum);
  if (lu.rcond() < 1e-12)
    throw std::runtime_error("coPeriodic: P+ + P- numerically singular");
  Mat Pcal = Pp * lu.inverse();
  if (data) {
    data->Pplus = Pp;
    data->Pminus = Pm;
    data->Pcal = Pcal;
  }
  Mat G = rePart(sys.Q(0.0, I1));
  return (Pcal - 0.5 * Mat::Identity(N, N)) * (I1 * G).inverse();
}

CharacteristicOperator coPeriodicOp(const CanonicalSystem& sys, double Tplus,
                                    double Tminus) {
  CharacteristicOperator co;
  co.t0 = 0.0;
  co.G = rePart(sys.Q(0.0, I1));
  co.provenance = "periodic";
  co.M = [sys, Tplus, Tminus](cplx lam) {
    return coPeriodic(sys, lam, Tplus, Tminus);
  };
  return co;
}

CheckReport checkCoSymmetry(const CharacteristicOperator& co,
                            const std::vector<cplx>& lams) {
  CheckReport rep;
  for (cplx lam : lams) {
    double r = (co.M(lam).adjoint() - co.M(std::conj(lam))).norm();
    rep.worst = std::max(rep.worst, r);
  }
  rep.pass = rep.worst <= 1e-8;
  return rep;
}

CheckReport checkProjectionSeparation(const CharacteristicOperator& co,
                                      const std::vector<cplx>& lams) {
  CheckReport rep;
  const int N = (int)co.G.rows();
  for (cplx lam : lams) {
    Mat P = co.M(lam) * (I1 * co.G) + 0.5 * Mat::Identity(N, N);
    rep.worst = std::max(rep.worst, (P * P - P).norm());
  }
  rep.pass = rep.worst <= 1e-8;
  return rep;
}

CheckReport checkInertiaBalance(const Mat& G) {
  CheckReport rep;
  Inertia in = inertia(G);
  rep.pass = (in.pos == in.neg);
  rep.worst = std::abs(in.pos - in.neg);
  rep.note = "signature (" + std::to_string(in.neg) + "," +
             std::to_string(in.zero) + "," + std::to_string(in.pos) + ")";
  return rep;
}

}  // namespace pencil
