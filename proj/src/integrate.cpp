#include "pencil/integrate.hpp"

namespace pencil {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432.0,
                 d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0,
                 d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0,
                 d7 = 69997945.0 / 29380423.0;

double errorNorm(const Vec& err, const Vec& y0, const Vec& y1, double rtol,
                 double atol) {
  double acc = 0.0;
  for (int i = 0; i < err.size(); ++i) {
    double sk = atol + rtol * std::max(std::abs(y0(i)), std::abs(y1(i)));
    double e = std::abs(err(i)) / sk;
    acc += e * e;
  }
  return std::sqrt(acc / std::max<int>(1, (int)err.size()));
}

double initialStep(const OdeField& f, double t0, const Vec& y0, double dir,
                   double rtol, double atol) {
  Vec f0 = f(t0, y0);
  double dn = 0.0, dy = 0.0;
  for (int i = 0; i < y0.size(); ++i) {
    double sk = atol + rtol * std::abs(y0(i));
    dn += std::pow(std::abs(f0(i)) / sk, 2);
    dy += std::pow(std::abs(y0(i)) / sk, 2);
  }
  double h = (dn > 1e-10 && dy > 1e-10) ? 0.01 * std::sqrt(dy / dn) : 1e-6;
  return dir * std::min(h, 0.1);
}

void integrateCore(OdeSolution& sol, const OdeField& f, double t0, double t1,
                   const Vec& ystart, double rtol, double atol) {
  const double dir = (t1 >= t0) ? 1.0 : -1.0;
  if (std::abs(t1 - t0) < 1e-15) return;
  Vec y = ystart;
  double t = t0;
  double h = initialStep(f, t0, y, dir, rtol, atol);
  Vec k1 = f(t, y);
  bool rejectedLast = false;
  long guard = 0;
  while (dir * (t1 - t) > 1e-14 * (1.0 + std::abs(t))) {
    if (++guard > 2000000) throw std::runtime_error("odeSolve: step limit");
    if (dir * (t + h - t1) > 0.0) h = t1 - t;
    Vec k2 = f(t + c2 * h, y + h * (a21 * k1));
    Vec k3 = f(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
    Vec k4 = f(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    Vec k5 = f(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    Vec ys = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    Vec k6 = f(t + h, ys);
    Vec ynew = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    Vec k7 = f(t + h, ynew);
    Vec err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double en = errorNorm(err, y, ynew, rtol, atol);
    if (en <= 1.0) {
      OdeStep st;
      st.t0 = t;
      st.h = h;
      Vec ydiff = ynew - y;
      Vec bspl = h * k1 - ydiff;
      st.rcont[0] = y;
      st.rcont[1] = ydiff;
      st.rcont[2] = bspl;
      st.rcont[3] = ydiff - h * k7 - bspl;
      st.rcont[4] = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
      sol.steps.push_back(std::move(st));
      ++sol.nsteps;
      t += h;
      y = ynew;
      k1 = k7;  // FSAL
      double fac = 0.9 * std::pow(std::max(en, 1e-10), -0.2);
      fac = std::min(rejectedLast ? 1.0 : 5.0, std::max(0.2, fac));
      h *= fac;
      rejectedLast = false;
    } else {
      ++sol.nrejected;
      rejectedLast = true;
      h *= std::max(0.1, 0.9 * std::pow(en, -0.2));
      if (std::abs(h) < 1e-14 * (1.0 + std::abs(t)))
        throw std::runtime_error("odeSolve: step size underflow");
    }
  }
  sol.tb = t1;
  sol.yend = y;
}

}  // namespace

Vec OdeStep::eval(double t) const {
  double th = (t - t0) / h, th1 = 1.0 - th;
  return rcont[0] +
         th * (rcont[1] + th1 * (rcont[2] + th * (rcont[3] + th1 * rcont[4])));
}

Vec OdeSolution::eval(double t) const {
  if (steps.empty()) return y0;
  if (!covers(t)) throw std::runtime_error("OdeSolution::eval: t out of range");
  // binary search over step start times (monotone in integration direction)
  double sgn = dir();
  int lo = 0, hi = (int)steps.size() - 1;
  while (lo < hi) {
    int mid = (lo + hi + 1) / 2;
    if (sgn * (t - steps[mid].t0) >= 0.0)
      lo = mid;
    else
      hi = mid - 1;
  }
  return steps[lo].eval(t);
}

OdeSolution odeSolve(const OdeField& f, double t0, double t1, const Vec& y0,
                     double rtol, double atol) {
  OdeSolution sol;
  sol.ta = t0;
  sol.tb = t0;
  sol.y0 = y0;
  sol.yend = y0;
  integrateCore(sol, f, t0, t1, y0, rtol, atol);
  return sol;
}

void odeExtend(OdeSolution& sol, const OdeField& f, double tNew, double rtol,
               double atol) {
  if (sol.covers(tNew)) return;
  double sgn = sol.dir();
  if (std::abs(sol.tb - sol.ta) > 0 && sgn * (tNew - sol.tb) < 0)
    throw std::runtime_error("odeExtend: wrong direction");
  integrateCore(sol, f, sol.tb, tNew, sol.yend, rtol, atol);
}

// ---------------------------------------------------------------------------

OdeField FundamentalSolution::field_() const {
  auto Af = A;
  int n = N;
  return [Af, n](double t, const Vec& x) -> Vec {
    Mat X = Eigen::Map<const Mat>(x.data(), n, n);
    Mat dX = Af(t) * X;
    return Eigen::Map<const Vec>(dX.data(), n * n);
  };
}

Mat FundamentalSolution::operator()(double t) {
  Vec id = Eigen::Map<const Vec>(Mat::Identity(N, N).eval().data(), N * N);
  if (std::abs(t - t0) < 1e-15) return Mat::Identity(N, N);
  if (t > t0) {
    if (!hasFwd_) {
      fwd_ = odeSolve(field_(), t0, t, id, rtol, atol);
      hasFwd_ = true;
    } else if (!fwd_.covers(t)) {
      odeExtend(fwd_, field_(), t, rtol, atol);
    }
    Vec x = fwd_.eval(t);
    return Eigen::Map<const Mat>(x.data(), N, N);
  }
  if (!hasBwd_) {
    bwd_ = odeSolve(field_(), t0, t, id, rtol, atol);
    hasBwd_ = true;
  } else if (!bwd_.covers(t)) {
    odeExtend(bwd_, field_(), t, rtol, atol);
  }
  Vec x = bwd_.eval(t);
  return Eigen::Map<const Mat>(x.data(), N, N);
}

std::function<Mat(double)> canonicalMatrixField(const CanonicalSystem& sys,
                                                cplx lam) {
  return [sys, lam](double t) -> Mat {
    Mat rhs = sys.H(t, lam) - cplx(0.0, 0.5) * sys.Q(t, lam, 1);
    return sys.M0(t, lam).inverse() * rhs;
  };
}

FundamentalSolution fundamentalSolution(const CanonicalSystem& sys, cplx lam,
                                        double t0, double rtol, double atol) {
  FundamentalSolution X;
  X.N = sys.N;
  X.t0 = t0;
  X.A = canonicalMatrixField(sys, lam);
  X.rtol = rtol;
  X.atol = atol;
  return X;
}

Mat gramMatrix(const CanonicalSystem& sys, FundamentalSolution& X, cplx lamSol,
               double a, double b, int nseg) {
  const int N = sys.N;
  X(b);  // ensure coverage before quadrature sampling
  X(a);
  auto integrand = [&](double t) -> Mat {
    Mat Xt = X(t);
    Mat Wt = weightMatrix(sys.P.L, lamSol, sys.P.m, t);
    return Xt.adjoint() * Wt * Xt;
  };
  return quadGauss(integrand, a, b, nseg, Mat(Mat::Zero(N, N)));
}

Mat monodromy(const CanonicalSystem& sys, cplx lam, double t0, double T,
              double rtol, double atol) {
  auto X = fundamentalSolution(sys, lam, t0, rtol, atol);
  return X(t0 + T);
}

bool constantFieldEigen(const CanonicalSystem& sys, cplx lam, double t0,
                        double T, Mat& V, Eigen::VectorXcd& d) {
  auto A = canonicalMatrixField(sys, lam);
  Mat A0 = A(t0);
  double scale = 1.0 + A0.norm();
  double span = (T != 0.0) ? T : 1.0;
  for (double th : {0.37, 0.71, 0.98}) {
    if ((A(t0 + th * span) - A0).norm() > 1e-12 * scale) return false;
  }
  Eigen::ComplexEigenSolver<Mat> es(A0);
  if (es.info() != Eigen::Success) return false;
  V = es.eigenvectors();
  d = es.eigenvalues();
  // require a well-conditioned eigenbasis; fall back otherwise
  Eigen::JacobiSVD<Mat> svd(V);
  if (svd.singularValues()(svd.singularValues().size() - 1) <
      1e-10 * svd.singularValues()(0))
    return false;
  return true;
}

DefinitenessReport checkDefiniteness(const CanonicalSystem& sys, cplx lam,
                                     double a, double b, int nseg) {
  DefinitenessReport rep;
  rep.N = sys.N;
  auto X = fundamentalSolution(sys, lam, a);
  Mat D = gramMatrix(sys, X, lam, a, b, nseg);
  rep.minEig = minEig(0.5 * (D + D.adjoint()));
  rep.rank = numericalRank(D, 1e-9);
  rep.definite = (rep.rank == rep.N);
  return rep;
}

}  // namespace pencil
