#include "pencil/resolvent.hpp"

namespace pencil {

cplx mFormJets(const DiffExpr& m, const JetFn& u, const JetFn& v, double a,
               double b, int nseg) {
  auto dens = [&](double t) -> cplx {
    return dirichletDensity(m, t, 0.0, u(t), v(t));
  };
  return quadGauss(dens, a, b, nseg, cplx(0.0));
}

JetFn jetOf(const SmoothFn& f, int K) {
  return [f, K](double t) { return f.jet(t, K); };
}

ResolventOp::ResolventOp(CanonicalSystem sys, CharacteristicOperator co,
                         double a, double b, int nseg)
    : sys_(std::move(sys)), co_(std::move(co)), a_(a), b_(b), nseg_(nseg) {}

Mat ResolventOp::kernel(double t, double s, cplx lam) const {
  // tight tolerances: errors in X are amplified by the solution growth over
  // wide windows
  auto X = fundamentalSolution(sys_, lam, co_.t0, 1e-12, 1e-14);
  auto Y = fundamentalSolution(sys_, std::conj(lam), co_.t0, 1e-12, 1e-14);
  Mat iGinv = (I1 * co_.G).inverse();
  double sg = (s > t) ? 1.0 : (s < t ? -1.0 : 0.0);
  return X(t) * (co_.M(lam) - 0.5 * sg * iGinv) * Y(s).adjoint();
}

ResolventApplication ResolventOp::apply(const SmoothFn& f, cplx lam) const {
  const int N = sys_.N;
  auto X = std::make_shared<FundamentalSolution>(
      fundamentalSolution(sys_, lam, co_.t0, 1e-12, 1e-14));
  auto Y = std::make_shared<FundamentalSolution>(
      fundamentalSolution(sys_, std::conj(lam), co_.t0, 1e-12, 1e-14));
  (*X)(a_);
  (*X)(b_);
  (*Y)(a_);
  (*Y)(b_);

  CanonicalSystem sys = sys_;
  auto g = [sys, Y, lam, f](double s) -> Vec {
    return (*Y)(s).adjoint() * sys.liftRhs(s, lam, f);
  };

  // prefix integrals of g at uniform breakpoints
  const double h = (b_ - a_) / nseg_;
  auto prefix = std::make_shared<std::vector<Vec>>(nseg_ + 1, Vec::Zero(N));
  for (int k = 0; k < nseg_; ++k)
    (*prefix)[k + 1] =
        (*prefix)[k] +
        quadGauss(g, a_ + k * h, a_ + (k + 1) * h, 1, Vec(Vec::Zero(N)));
  Vec Vtot = (*prefix)[nseg_];

  double a = a_, b = b_;
  int nseg = nseg_;
  auto Vup = [g, prefix, a, b, h, nseg, N](double t) -> Vec {
    double tc = std::min(std::max(t, a), b);
    int k = std::min((int)std::floor((tc - a) / h), nseg - 1);
    double tk = a + k * h;
    Vec part = (tc - tk > 1e-14)
                   ? quadGauss(g, tk, tc, 1, Vec(Vec::Zero(N))).eval()
                   : Vec(Vec::Zero(N));
    return (*prefix)[k] + part;
  };

  Mat Mlam = co_.M(lam);
  Mat iGinv = (I1 * co_.G).inverse();
  auto state = [X, Mlam, iGinv, Vtot, Vup](double t) -> Vec {
    Vec inner = Mlam * Vtot + 0.5 * iGinv * (2.0 * Vup(t) - Vtot);
    return (*X)(t)*inner;
  };

  ResolventApplication app;
  app.lam = lam;
  app.a = a_;
  app.b = b_;
  app.state = state;
  app.jet = [sys, lam, state, f](double t) {
    return sys.recoverJet(t, lam, state(t), &f);
  };
  auto jet = app.jet;
  app.y1 = [jet](double t) { return jet(t)[0]; };
  return app;
}

double ResolventOp::normM(const ResolventApplication& app) const {
  cplx v = mFormJets(sys_.P.m, app.jet, app.jet, a_, b_, nseg_);
  return std::sqrt(std::max(0.0, v.real()));
}

cplx ResolventOp::mInner(const ResolventApplication& app,
                         const SmoothFn& g) const {
  return mFormJets(sys_.P.m, app.jet, jetOf(g, std::max(0, sys_.r - 1)), a_,
                   b_, nseg_);
}

CheckReport checkResidual(const ResolventOp& R, const ResolventApplication& app,
                          const SmoothFn& f, int npts) {
  CheckReport rep;
  const auto& sys = R.sys();
  cplx lam = app.lam;
  double scale = 1.0;
  const double fd = 1e-5;
  for (int i = 1; i <= npts; ++i) {
    double t = app.a + (app.b - app.a) * i / (npts + 1.0);
    Vec rhs = sys.liftRhs(t, lam, f);
    scale = std::max(scale, 1.0 + rhs.norm());
    Vec xp = (app.state(t + fd) - app.state(t - fd)) / (2.0 * fd);
    Vec x = app.state(t);
    Vec res = sys.M0(t, lam) * xp -
              (sys.H(t, lam) * x - cplx(0.0, 0.5) * (sys.Q(t, lam, 1) * x) + rhs);
    rep.worst = std::max(rep.worst, res.norm());
  }
  rep.worst /= scale;
  rep.pass = rep.worst <= 1e-6;
  return rep;
}

CheckReport checkAdjointPair(const ResolventOp& R, const SmoothFn& f,
                             const SmoothFn& g, cplx lam) {
  CheckReport rep;
  auto appF = R.apply(f, lam);
  auto appG = R.apply(g, std::conj(lam));
  cplx lhs = R.mInner(appF, g);          // m[R(lam) f, g]
  cplx rhs = std::conj(R.mInner(appG, f));  // m[f, R(conj lam) g]
  double scale = 1.0 + std::abs(lhs) + std::abs(rhs);
  rep.worst = std::abs(lhs - rhs) / scale;
  rep.pass = rep.worst <= 1e-7;
  return rep;
}

CheckReport checkDissipativity(const ResolventOp& R, const SmoothFn& f,
                               cplx lam) {
  CheckReport rep;
  auto app = R.apply(f, lam);
  double lhs = R.normM(app);
  lhs *= lhs;
  double rhs = (R.mInner(app, f)).imag() / lam.imag();
  double ff =
      mFormJets(R.sys().P.m, jetOf(f, std::max(0, R.sys().r - 1)),
                jetOf(f, std::max(0, R.sys().r - 1)), R.a(), R.b(), 64)
          .real();
  double scale = 1.0 + std::abs(ff);
  rep.worst = (lhs - rhs) / scale;  // positive = violation
  rep.pass = rep.worst <= 1e-8;
  return rep;
}

CheckReport checkKernelJump(const ResolventOp& R, cplx lam,
                            const std::vector<double>& ts) {
  CheckReport rep;
  auto X = fundamentalSolution(R.sys(), lam, R.co().t0);
  auto Y = fundamentalSolution(R.sys(), std::conj(lam), R.co().t0);
  Mat iGinv = (I1 * R.co().G).inverse();
  const double d0 = 1e-5;
  for (double t : ts) {
    auto jump = [&](double d) -> Mat {
      return R.kernel(t, t + d, lam) - R.kernel(t, t - d, lam);
    };
    Mat J = 2.0 * jump(d0 / 2) - jump(d0);  // Richardson in the offset
    Mat exact = -X(t) * iGinv * Y(t).adjoint();
    rep.worst = std::max(rep.worst, (J - exact).norm() / (1.0 + exact.norm()));
  }
  rep.pass = rep.worst <= 1e-9;
  return rep;
}

CheckReport holomorphyProbe(const ResolventOp& R, const SmoothFn& f,
                            const SmoothFn& g, cplx lam0, double rho,
                            int npts) {
  CheckReport rep;
  cplx center = R.mInner(R.apply(f, lam0), g);
  cplx mean = 0.0;
  for (int k = 0; k < npts; ++k) {
    cplx lam = lam0 + rho * std::exp(I1 * (2.0 * M_PI * k / npts));
    mean += R.mInner(R.apply(f, lam), g);
  }
  mean /= (double)npts;
  rep.worst = std::abs(mean - center) / (1.0 + std::abs(center));
  rep.pass = rep.worst <= 1e-6;
  return rep;
}

CheckReport checkCoInequality(
    const ResolventOp& R, const SmoothFn& f, cplx lam,
    const std::vector<std::pair<double, double>>& windows) {
  CheckReport rep;
  auto app = R.apply(f, lam);
  auto U = [&](double t) -> double {
    Vec x = app.state(t);
    Mat Qr = rePart(R.sys().Q(t, lam));
    return inner(Qr * x, x).real();
  };
  double scale = 1.0;
  double worstSigned = -1e300;
  for (auto [al, be] : windows) {
    double ua = U(al), ub = U(be);
    scale = std::max(scale, 1.0 + std::abs(ua) + std::abs(ub));
    worstSigned = std::max(worstSigned, lam.imag() * (ub - ua));
  }
  rep.worst = worstSigned / scale;
  rep.pass = rep.worst <= 1e-8;
  return rep;
}

BvpSolution solveBvp(const CanonicalSystem& sys, const BoundaryPair& bp,
                     const SmoothFn& f, cplx lam, int nseg) {
  const int N = sys.N;
  auto co = coBoundary(sys, bp);
  ResolventOp R(sys, co, bp.a, bp.b, nseg);
  BvpSolution out;
  out.app = R.apply(f, lam);
  Vec xa = out.app.state(bp.a), xb = out.app.state(bp.b);
  Mat A(2 * N, N);
  A << bp.Mb(lam), bp.Nb(lam);
  Vec rhs(2 * N);
  rhs << xa, xb;
  out.h = A.colPivHouseholderQr().solve(rhs);
  out.boundaryResidual = (A * out.h - rhs).norm();
  out.normM = R.normM(out.app);
  return out;
}

}  // namespace pencil
