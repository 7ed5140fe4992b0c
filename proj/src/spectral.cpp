#include "pencil/spectral.hpp"

#include <algorithm>

namespace pencil {

Mat densityStieltjesAt(const std::function<Mat(cplx)>& M, double mu,
                       const EpsLadder& lad) {
  double eps = lad.eps0 / std::pow(2.0, lad.rungs - 1);
  Mat v1 = imPart(M(cplx(mu, eps))) / M_PI;
  Mat v2 = imPart(M(cplx(mu, 2.0 * eps))) / M_PI;
  return 2.0 * v1 - v2;  // first-order Richardson in eps
}

bool detectJump(const std::function<Mat(cplx)>& M, double mu0, Mat& Jout,
                const EpsLadder& lad, double thresh) {
  std::vector<Mat> w;
  std::vector<double> epss;
  for (int k = 0; k < lad.rungs; ++k) {
    double eps = lad.eps0 / std::pow(2.0, k);
    w.push_back(eps * imPart(M(cplx(mu0, eps))));
    epss.push_back(eps);
  }
  // a point mass makes eps*Im M stabilize at a nonzero limit
  int n = (int)w.size();
  bool stable = true;
  for (int k = n - 3; k < n; ++k) {
    if (w[k].norm() <= thresh) stable = false;
  }
  if (stable) {
    double ratio = w[n - 1].norm() / w[n - 2].norm();
    if (ratio < 0.5 || ratio > 2.0) stable = false;
  }
  if (!stable) return false;
  Jout = 2.0 * w[n - 1] - w[n - 2];  // Richardson in eps
  return true;
}

SpectralDensity densityStieltjes(const std::function<Mat(cplx)>& M,
                                 const std::vector<double>& grid,
                                 const EpsLadder& lad, double jumpThresh) {
  SpectralDensity out;
  out.method = "stieltjes";
  for (double mu : grid) {
    DensitySample s;
    s.mu = mu;
    try {
      s.sigmaPrime = densityStieltjesAt(M, mu, lad);
      Mat J;
      if (detectJump(M, mu, J, lad, jumpThresh)) out.jumps.push_back({mu, J});
    } catch (const std::exception& e) {
      s.resolved = false;
      s.note = e.what();
    }
    out.samples.push_back(std::move(s));
  }
  return out;
}

namespace {

// Projections in the eigenbasis of A onto (a) all eigenvalues strictly inside
// the unit disk together with circle eigenvalues that move inside under the
// perturbation Apert, and (b) the moving circle eigenvalues alone.
void floquetProjections(const Mat& A, const Mat& Apert, double circTol,
                        double edgeTol, Mat& P, Mat& q) {
  const int N = (int)A.rows();
  Eigen::ComplexEigenSolver<Mat> es(A), esp(Apert);
  auto z = es.eigenvalues();
  auto zp = esp.eigenvalues();
  // band-edge collision guard: coinciding circle multiplicators
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j) {
      bool ci = std::abs(std::abs(z(i)) - 1.0) < circTol;
      bool cj = std::abs(std::abs(z(j)) - 1.0) < circTol;
      if (ci && cj && std::abs(z(i) - z(j)) < edgeTol)
        throw std::runtime_error(
            "floquetProjections: multiplicator collision (band edge)");
    }
  Mat V = es.eigenvectors();
  Mat Vi = V.inverse();
  Mat DP = Mat::Zero(N, N), Dq = Mat::Zero(N, N);
  for (int i = 0; i < N; ++i) {
    double r = std::abs(z(i));
    if (std::abs(r - 1.0) < circTol) {
      // track to the nearest perturbed eigenvalue
      int best = 0;
      double bd = 1e300;
      for (int j = 0; j < N; ++j) {
        double dd = std::abs(zp(j) - z(i));
        if (dd < bd) {
          bd = dd;
          best = j;
        }
      }
      if (std::abs(zp(best)) < 1.0) {
        DP(i, i) = 1.0;
        Dq(i, i) = 1.0;
      }
    } else if (r < 1.0) {
      DP(i, i) = 1.0;
    }
  }
  P = V * DP * Vi;
  q = V * Dq * Vi;
}

// Same classification from monodromy exponents: multiplicator z_i = exp(m_i)
// with |z_i| - 1 ~ Re m_i.  Avoids assembling exponentials that overflow when
// coefficients blow up near an excluded point (constant-coefficient systems).
void floquetProjectionsExp(const Mat& V, const Eigen::VectorXcd& ex,
                           const Eigen::VectorXcd& exPert, double circTol,
                           double edgeTol, Mat& P, Mat& q) {
  const int N = (int)V.rows();
  std::vector<bool> onCircle(N);
  for (int i = 0; i < N; ++i) onCircle[i] = std::abs(ex(i).real()) < circTol;
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j) {
      if (!onCircle[i] || !onCircle[j]) continue;
      cplx zi = std::exp(cplx(0.0, ex(i).imag()));
      cplx zj = std::exp(cplx(0.0, ex(j).imag()));
      if (std::abs(zi - zj) < edgeTol)
        throw std::runtime_error(
            "floquetProjections: multiplicator collision (band edge)");
    }
  Mat Vi = V.inverse();
  Mat DP = Mat::Zero(N, N), Dq = Mat::Zero(N, N);
  for (int i = 0; i < N; ++i) {
    if (onCircle[i]) {
      int best = 0;
      double bd = 1e300;
      for (int j = 0; j < N; ++j) {
        double dd = std::abs(exPert(j) - ex(i));
        if (dd < bd) {
          bd = dd;
          best = j;
        }
      }
      if (exPert(best).real() < 0.0) {
        DP(i, i) = 1.0;
        Dq(i, i) = 1.0;
      }
    } else if (ex(i).real() < 0.0) {
      DP(i, i) = 1.0;
    }
  }
  P = V * DP * Vi;
  q = V * Dq * Vi;
}

}  // namespace

Mat densityPeriodicAt(const CanonicalSystem& sys, double mu, double Tplus,
                      double Tminus, double eps, double edgeTol) {
  cplx lamE(mu, eps);
  Mat Pp, qp, Pm, qm;
  Mat V, Vp;
  Eigen::VectorXcd dv, dvp;
  if (constantFieldEigen(sys, mu, 0.0, Tplus, V, dv) &&
      constantFieldEigen(sys, lamE, 0.0, Tplus, Vp, dvp)) {
    floquetProjectionsExp(V, dv * Tplus, dvp * Tplus, 1e-6, edgeTol, Pp, qp);
    floquetProjectionsExp(V, dv * (-Tminus), dvp * (-Tminus), 1e-6, edgeTol,
                          Pm, qm);
  } else {
    Mat Ap = monodromy(sys, mu, 0.0, Tplus);
    Mat Am = monodromy(sys, mu, 0.0, -Tminus);
    Mat App = monodromy(sys, lamE, 0.0, Tplus);
    Mat Amp = monodromy(sys, lamE, 0.0, -Tminus);
    floquetProjections(Ap, App, 1e-6, edgeTol, Pp, qp);
    floquetProjections(Am, Amp, 1e-6, edgeTol, Pm, qm);
  }
  Eigen::FullPivLU<Mat> lu(Pp + Pm);
  if (lu.rcond() < 1e-10)
    throw std::runtime_error("densityPeriodicAt: P+ + P- singular");
  Mat S = lu.inverse();
  Mat Qp = qp * S, Qm = qm * S;
  Mat G = rePart(sys.Q(0.0, I1));
  Mat Gi = G.inverse();
  return (0.5 / M_PI) *
         (Gi * (Qm.adjoint() * G * Qm - Qp.adjoint() * G * Qp) * Gi);
}

Vec transformV1(const CanonicalSystem& sys, const SmoothFn& f, double mu,
                double fa, double fb, int nseg) {
  auto X = fundamentalSolution(sys, mu, 0.0);
  X(fa);
  X(fb);
  const int d = sys.d;
  auto integrand = [&](double t) -> Vec {
    return X(t).topRows(d).adjoint() * exprApplyFn(sys.P.m, f, t, 0.0);
  };
  return quadGauss(integrand, fa, fb, nseg, Vec(Vec::Zero(sys.N)));
}

Vec transformV2(const CanonicalSystem& sys, const SmoothFn& f, double mu,
                double fa, double fb, int nseg) {
  auto X = fundamentalSolution(sys, mu, 0.0);
  X(fa);
  X(fb);
  auto integrand = [&](double t) -> Vec {
    return X(t).adjoint() * sys.liftRhs(t, mu, f);
  };
  return quadGauss(integrand, fa, fb, nseg, Vec(Vec::Zero(sys.N)));
}

std::vector<double> gradedBreaks(double a, double b,
                                 const std::vector<double>& edges, int baseSeg,
                                 int levels) {
  std::vector<double> pts;
  for (int j = 0; j <= baseSeg; ++j) pts.push_back(a + (b - a) * j / baseSeg);
  double span = b - a;
  for (double e : edges) {
    if (e < a - 1e-12 || e > b + 1e-12) continue;
    pts.push_back(std::min(std::max(e, a), b));
    for (int k = 2; k <= levels; ++k) {
      double off = span * std::pow(2.0, -k);
      if (e - off > a) pts.push_back(e - off);
      if (e + off < b) pts.push_back(e + off);
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [&](double x, double y) {
                          return std::abs(x - y) < 1e-13 * (1.0 + span);
                        }),
            pts.end());
  return pts;
}

std::vector<Vec> expansionAC(const CanonicalSystem& sys,
                             const std::function<Mat(double)>& sigmaPrime,
                             const SmoothFn& f, double fa, double fb,
                             const std::vector<double>& muBreaks,
                             const std::vector<double>& ts, int nsegT) {
  const int d = sys.d;
  std::vector<Vec> out(ts.size(), Vec::Zero(d));
  double lo = fa, hi = fb;
  for (double t : ts) {
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
  for (size_t seg = 0; seg + 1 < muBreaks.size(); ++seg) {
    double a = muBreaks[seg], b = muBreaks[seg + 1];
    double h = b - a, c = 0.5 * (a + b);
    for (int g = 0; g < 5; ++g) {
      double mu = c + 0.5 * h * gauss5::xs[g];
      double w = 0.5 * h * gauss5::ws[g];
      auto X = fundamentalSolution(sys, mu, 0.0);
      X(lo);
      X(hi);
      auto integrand = [&](double s) -> Vec {
        return X(s).adjoint() * sys.liftRhs(s, mu, f);
      };
      Vec phi = quadGauss(integrand, fa, fb, nsegT, Vec(Vec::Zero(sys.N)));
      Vec sp = sigmaPrime(mu) * phi;
      for (size_t i = 0; i < ts.size(); ++i)
        out[i] += w * (X(ts[i]).topRows(d) * sp);
    }
  }
  return out;
}

JumpAtom jumpAtom(const ResolventOp& R, const SmoothFn& f, double mu0,
                  double eps) {
  auto a1 = std::make_shared<ResolventApplication>(
      R.apply(f, cplx(mu0, eps)));
  auto a2 = std::make_shared<ResolventApplication>(
      R.apply(f, cplx(mu0, eps / 2)));
  JumpAtom atom;
  // Richardson in eps of -i eps R(mu0 + i eps) f
  atom.jet = [a1, a2, eps](double t) -> std::vector<Vec> {
    auto j1 = a1->jet(t), j2 = a2->jet(t);
    std::vector<Vec> out(j1.size());
    for (size_t k = 0; k < j1.size(); ++k)
      out[k] = -I1 * (2.0 * (eps / 2) * j2[k] - eps * j1[k]);
    return out;
  };
  auto jet = atom.jet;
  atom.y1 = [jet](double t) -> Vec { return jet(t)[0]; };
  return atom;
}

ParsevalReport parsevalBessel(const CanonicalSystem& sys,
                              const std::function<Mat(double)>& sigmaPrime,
                              const SmoothFn& f, double fa, double fb,
                              const std::vector<double>& muBreaks,
                              double jumpContrib, int nsegT) {
  ParsevalReport rep;
  int K = std::max(0, sys.r - 1);
  rep.lhs = mFormJets(sys.P.m, jetOf(f, K), jetOf(f, K), fa, fb, nsegT).real();
  double acc = 0.0;
  for (size_t seg = 0; seg + 1 < muBreaks.size(); ++seg) {
    double a = muBreaks[seg], b = muBreaks[seg + 1];
    double h = b - a, c = 0.5 * (a + b);
    for (int g = 0; g < 5; ++g) {
      double mu = c + 0.5 * h * gauss5::xs[g];
      double w = 0.5 * h * gauss5::ws[g];
      Vec phi = transformV2(sys, f, mu, fa, fb, nsegT);
      acc += w * inner(sigmaPrime(mu) * phi, phi).real();
    }
  }
  rep.rhs = acc + jumpContrib;
  rep.besselSlack = rep.lhs - rep.rhs;
  rep.parsevalRel = std::abs(rep.lhs - rep.rhs) / std::max(rep.lhs, 1e-300);
  return rep;
}

}  // namespace pencil
