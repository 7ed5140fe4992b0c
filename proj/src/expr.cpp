#include "pencil/expr.hpp"

#include <cmath>
#include <limits>
#include <map>

namespace pencil {

// ===========================================================================
// SmoothFn builders (declared in core.hpp)
// ===========================================================================

SmoothFn SmoothFn::polyExp(std::vector<Vec> coeffs, cplx g) {
  if (coeffs.empty()) throw std::runtime_error("polyExp: empty coefficient list");
  int d = static_cast<int>(coeffs[0].size());
  // ladder[k] = polynomial coefficients of the k-th derivative
  auto ladder = std::make_shared<std::vector<std::vector<Vec>>>();
  ladder->push_back(std::move(coeffs));
  auto deriv = [ladder, g, d](double t, int k) -> Vec {
    while (static_cast<int>(ladder->size()) <= k) {
      const auto& P = ladder->back();
      std::vector<Vec> N(P.size(), Vec::Zero(d));
      for (size_t j = 0; j < P.size(); ++j) {
        N[j] += g * P[j];
        if (j + 1 < P.size()) N[j] += cplx(double(j + 1), 0.0) * P[j + 1];
      }
      ladder->push_back(std::move(N));
    }
    const auto& P = (*ladder)[k];
    Vec acc = Vec::Zero(d);
    double tj = 1.0;
    for (size_t j = 0; j < P.size(); ++j, tj *= t) acc += tj * P[j];
    return std::exp(g * t) * acc;
  };
  return SmoothFn{d, deriv};
}

SmoothFn SmoothFn::gaussian(Vec amplitude, double center, double width) {
  int d = static_cast<int>(amplitude.size());
  auto deriv = [amplitude, center, width](double t, int k) -> Vec {
    double u = (t - center) / width;
    // probabilists' Hermite polynomials: He_{k+1} = u He_k - k He_{k-1}
    double he0 = 1.0, he1 = u;
    double he = (k == 0) ? he0 : he1;
    for (int j = 1; j < k; ++j) {
      double next = u * he1 - j * he0;
      he0 = he1;
      he1 = next;
      he = next;
    }
    double sign = (k % 2 == 0) ? 1.0 : -1.0;
    double val = sign * std::pow(width, -k) * he * std::exp(-0.5 * u * u);
    return val * amplitude;
  };
  return SmoothFn{d, deriv};
}

SmoothFn SmoothFn::sum(SmoothFn a, SmoothFn b) {
  if (a.d != b.d) throw std::runtime_error("SmoothFn::sum: dimension mismatch");
  int d = a.d;
  auto deriv = [a, b](double t, int k) -> Vec { return a.deriv(t, k) + b.deriv(t, k); };
  return SmoothFn{d, deriv};
}

SmoothFn SmoothFn::zero(int d) {
  return SmoothFn{d, [d](double, int) { return Vec::Zero(d); }};
}

SmoothFn scalarPolyExp(std::vector<cplx> coeffs, cplx g) {
  std::vector<Vec> c;
  for (cplx v : coeffs) {
    Vec e(1);
    e(0) = v;
    c.push_back(e);
  }
  return SmoothFn::polyExp(std::move(c), g);
}

// ===========================================================================
// Coefficient builders
// ===========================================================================

Coefficient Coefficient::zero(int d) {
  Coefficient c;
  c.d = d;
  c.isZero = true;
  c.fn = [d](double, cplx, int) { return Mat::Zero(d, d); };
  return c;
}

Coefficient Coefficient::constant(const Mat& A) {
  Coefficient c;
  c.d = static_cast<int>(A.rows());
  Mat Ac = A;
  c.fn = [Ac](double, cplx, int k) {
    return k == 0 ? Ac : Mat::Zero(Ac.rows(), Ac.cols()).eval();
  };
  return c;
}

Coefficient Coefficient::tpoly(std::vector<Mat> A) {
  if (A.empty()) throw std::runtime_error("tpoly: empty");
  Coefficient c;
  c.d = static_cast<int>(A[0].rows());
  int d = c.d;
  c.fn = [A, d](double t, cplx, int k) -> Mat {
    Mat acc = Mat::Zero(d, d);
    // k-th derivative of sum A_j t^j: sum_{j>=k} j!/(j-k)! A_j t^(j-k)
    for (size_t j = k; j < A.size(); ++j) {
      double fac = 1.0;
      for (size_t i = j - k + 1; i <= j; ++i) fac *= double(i);
      acc += fac * std::pow(t, double(j - k)) * A[j];
    }
    return acc;
  };
  return c;
}

Coefficient Coefficient::lamFn(int d, std::function<Mat(cplx)> f) {
  Coefficient c;
  c.d = d;
  c.fn = [f, d](double, cplx lam, int k) -> Mat {
    return k == 0 ? f(lam) : Mat::Zero(d, d).eval();
  };
  return c;
}

Coefficient Coefficient::tpolyLam(int d, std::vector<std::function<Mat(cplx)>> f) {
  Coefficient c;
  c.d = d;
  c.fn = [f, d](double t, cplx lam, int k) -> Mat {
    Mat acc = Mat::Zero(d, d);
    for (size_t j = k; j < f.size(); ++j) {
      double fac = 1.0;
      for (size_t i = j - k + 1; i <= j; ++i) fac *= double(i);
      acc += fac * std::pow(t, double(j - k)) * f[j](lam);
    }
    return acc;
  };
  return c;
}

Coefficient Coefficient::numeric(int d, std::function<Mat(double, cplx)> value,
                                 double h) {
  Coefficient c;
  c.d = d;
  // Richardson-extrapolated central differences, applied recursively in k.
  auto self = std::make_shared<std::function<Mat(double, cplx, int)>>();
  *self = [value, h, self](double t, cplx lam, int k) -> Mat {
    if (k == 0) return value(t, lam);
    auto lower = [&](double tt) { return (*self)(tt, lam, k - 1); };
    double hh = h * std::pow(40.0, k - 1);  // widen step for nested levels
    Mat D1 = (lower(t + hh) - lower(t - hh)) / (2 * hh);
    Mat D2 = (lower(t + hh / 2) - lower(t - hh / 2)) / hh;
    return (4.0 * D2 - D1) / 3.0;
  };
  c.fn = [self](double t, cplx lam, int k) { return (*self)(t, lam, k); };
  return c;
}

Coefficient Coefficient::adjointC() const {
  Coefficient c;
  c.d = d;
  c.isZero = isZero;
  auto base = fn;
  c.fn = [base](double t, cplx lam, int k) { return base(t, lam, k).adjoint().eval(); };
  return c;
}

Coefficient Coefficient::add(const Coefficient& a, const Coefficient& b) {
  if (a.isZero) return b;
  if (b.isZero) return a;
  Coefficient c;
  c.d = a.d;
  auto fa = a.fn, fb = b.fn;
  c.fn = [fa, fb](double t, cplx lam, int k) { return (fa(t, lam, k) + fb(t, lam, k)).eval(); };
  return c;
}

Coefficient Coefficient::scaleLam(const Coefficient& a, std::function<cplx(cplx)> s) {
  Coefficient c;
  c.d = a.d;
  c.isZero = a.isZero;
  auto fa = a.fn;
  c.fn = [fa, s](double t, cplx lam, int k) { return (s(lam) * fa(t, lam, k)).eval(); };
  return c;
}

MatSeries coeffSeries(const Coefficient& c, double t, cplx lam, int len) {
  MatSeries out(len);
  for (int k = 0; k < len; ++k) out[k] = c.fn(t, lam, k);
  return out;
}

// ===========================================================================
// DiffExpr
// ===========================================================================

DiffExpr DiffExpr::make(int r, int d) {
  if (r < 0) throw std::runtime_error("DiffExpr: order must be >= 0");
  DiffExpr e;
  e.r = r;
  e.d = d;
  e.p.assign(r / 2 + 1, Coefficient::zero(d));
  e.q.assign((r + 1) / 2 + 1, Coefficient::zero(d));
  e.s.assign((r + 1) / 2 + 1, Coefficient::zero(d));
  return e;
}

namespace {
const Coefficient& zeroCoeff(int d) {
  static std::map<int, Coefficient> cache;
  auto it = cache.find(d);
  if (it == cache.end()) it = cache.emplace(d, Coefficient::zero(d)).first;
  return it->second;
}
}  // namespace

const Coefficient& DiffExpr::pj(int j) const {
  if (j < 0 || j >= static_cast<int>(p.size())) return zeroCoeff(d);
  return p[j];
}
const Coefficient& DiffExpr::qj(int j) const {
  if (j < 1 || j >= static_cast<int>(q.size())) return zeroCoeff(d);
  return q[j];
}
const Coefficient& DiffExpr::sj(int j) const {
  if (j < 1 || j >= static_cast<int>(s.size())) return zeroCoeff(d);
  return s[j];
}

DiffExpr DiffExpr::adjointE() const {
  DiffExpr e = make(r, d);
  for (size_t j = 0; j < p.size(); ++j) e.p[j] = p[j].adjointC();
  for (size_t j = 1; j < q.size(); ++j) {
    e.q[j] = s[j].adjointC();
    e.s[j] = q[j].adjointC();
  }
  return e;
}

DiffExpr DiffExpr::add(const DiffExpr& a, const DiffExpr& b) {
  int r = std::max(a.r, b.r);
  DiffExpr e = make(r, a.d);
  for (int j = 0; j <= e.np(); ++j) e.p[j] = Coefficient::add(a.pj(j), b.pj(j));
  for (int j = 1; j <= e.nq(); ++j) {
    e.q[j] = Coefficient::add(a.qj(j), b.qj(j));
    e.s[j] = Coefficient::add(a.sj(j), b.sj(j));
  }
  return e;
}

DiffExpr DiffExpr::scaleLam(const DiffExpr& a, std::function<cplx(cplx)> sc) {
  DiffExpr e = make(a.r, a.d);
  for (size_t j = 0; j < a.p.size(); ++j) e.p[j] = Coefficient::scaleLam(a.p[j], sc);
  for (size_t j = 1; j < a.q.size(); ++j) {
    e.q[j] = Coefficient::scaleLam(a.q[j], sc);
    e.s[j] = Coefficient::scaleLam(a.s[j], sc);
  }
  return e;
}

DiffExpr DiffExpr::scale(const DiffExpr& a, cplx c) {
  return scaleLam(a, [c](cplx) { return c; });
}

DiffExpr DiffExpr::reE() const {
  DiffExpr adj = adjointE();
  DiffExpr sum = add(*this, adj);
  return scale(sum, 0.5);
}

DiffExpr DiffExpr::imE() const {
  DiffExpr adj = adjointE();
  DiffExpr e = make(r, d);
  const cplx c = 1.0 / cplx(0.0, 2.0);
  for (int j = 0; j <= np(); ++j)
    e.p[j] = Coefficient::scaleLam(
        Coefficient::add(pj(j), Coefficient::scaleLam(adj.pj(j), [](cplx) { return cplx(-1.0); })),
        [c](cplx) { return c; });
  for (int j = 1; j <= nq(); ++j) {
    e.q[j] = Coefficient::scaleLam(
        Coefficient::add(qj(j), Coefficient::scaleLam(adj.qj(j), [](cplx) { return cplx(-1.0); })),
        [c](cplx) { return c; });
    e.s[j] = Coefficient::scaleLam(
        Coefficient::add(sj(j), Coefficient::scaleLam(adj.sj(j), [](cplx) { return cplx(-1.0); })),
        [c](cplx) { return c; });
  }
  return e;
}

// ===========================================================================
// Evaluation
// ===========================================================================

namespace {
MatSeries shiftSer(const MatSeries& yser, int j) {
  if (j >= static_cast<int>(yser.size()))
    throw std::runtime_error("jet too short for requested derivative");
  return MatSeries(yser.begin() + j, yser.end());
}
}  // namespace

MatSeries exprApply(const DiffExpr& e, double t, cplx lam, const MatSeries& yser) {
  int outLen = static_cast<int>(yser.size()) - e.r;
  if (outLen < 1) throw std::runtime_error("exprApply: jet too short");
  int cols = static_cast<int>(yser[0].cols());
  MatSeries acc = seriesZero(e.d, cols, outLen);

  for (int j = 0; j <= e.np(); ++j) {
    if (e.pj(j).isZero) continue;
    // i^{2j} D^j (p_j y^(j))
    MatSeries term = seriesMul(coeffSeries(e.pj(j), t, lam, outLen + j), shiftSer(yser, j));
    for (int k = 0; k < j; ++k) term = seriesD(term);
    term.resize(outLen, Mat::Zero(e.d, cols));
    acc = seriesAdd(acc, seriesScale((j % 2 == 0) ? 1.0 : -1.0, term));
  }
  for (int j = 1; j <= e.nq(); ++j) {
    // i^{2j-1} (1/2) [ D^j (q_j y^(j-1)) + D^{j-1} (s_j y^(j)) ]
    cplx fac = 0.5 * ((j % 2 == 0) ? cplx(0.0, -1.0) : cplx(0.0, 1.0));
    if (!e.qj(j).isZero) {
      MatSeries term = seriesMul(coeffSeries(e.qj(j), t, lam, outLen + j), shiftSer(yser, j - 1));
      for (int k = 0; k < j; ++k) term = seriesD(term);
      term.resize(outLen, Mat::Zero(e.d, cols));
      acc = seriesAdd(acc, seriesScale(fac, term));
    }
    if (!e.sj(j).isZero) {
      MatSeries term = seriesMul(coeffSeries(e.sj(j), t, lam, outLen + j - 1), shiftSer(yser, j));
      for (int k = 0; k < j - 1; ++k) term = seriesD(term);
      term.resize(outLen, Mat::Zero(e.d, cols));
      acc = seriesAdd(acc, seriesScale(fac, term));
    }
  }
  return acc;
}

Vec exprApplyFn(const DiffExpr& e, const SmoothFn& f, double t, cplx lam) {
  auto jet = f.jet(t, e.r);
  MatSeries yser(jet.size());
  for (size_t k = 0; k < jet.size(); ++k) yser[k] = jet[k];
  return exprApply(e, t, lam, yser)[0].col(0);
}

std::vector<Mat> scalarize(const DiffExpr& e, double t, cplx lam) {
  std::vector<Mat> A(e.r + 1, Mat::Zero(e.d, e.d));
  auto binom = [](int n, int k) {
    double b = 1.0;
    for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
    return b;
  };
  for (int j = 0; j <= e.np(); ++j) {
    if (e.pj(j).isZero) continue;
    double sign = (j % 2 == 0) ? 1.0 : -1.0;
    for (int v = 0; v <= j; ++v)
      A[2 * j - v] += sign * binom(j, v) * e.pj(j)(t, lam, v);
  }
  for (int j = 1; j <= e.nq(); ++j) {
    cplx fac = 0.5 * ((j % 2 == 0) ? cplx(0.0, -1.0) : cplx(0.0, 1.0));
    if (!e.qj(j).isZero)
      for (int v = 0; v <= j; ++v)
        A[2 * j - 1 - v] += fac * binom(j, v) * e.qj(j)(t, lam, v);
    if (!e.sj(j).isZero)
      for (int v = 0; v <= j - 1; ++v)
        A[2 * j - 1 - v] += fac * binom(j - 1, v) * e.sj(j)(t, lam, v);
  }
  return A;
}

std::vector<MatSeries> quasiDerivSeries(const DiffExpr& e, double t, cplx lam,
                                        const MatSeries& yser) {
  const int r = e.r, n = e.r / 2;
  const bool even = (r % 2 == 0);
  int cols = static_cast<int>(yser[0].cols());
  std::vector<MatSeries> qd(r + 1);

  auto cs = [&](const Coefficient& c, int len) { return coeffSeries(c, t, lam, len); };

  for (int j = 0; j < n; ++j) qd[j] = shiftSer(yser, j);

  if (even) {
    // y^[n] = p_n y^(n) - (i/2) q_n y^(n-1)
    MatSeries a = seriesMul(cs(e.pj(n), static_cast<int>(yser.size()) - n), shiftSer(yser, n));
    if (!e.qj(n).isZero) {
      MatSeries b = seriesMul(cs(e.qj(n), static_cast<int>(yser.size()) - n + 1),
                              shiftSer(yser, n - 1));
      b.resize(a.size(), Mat::Zero(e.d, cols));
      a = seriesSub(a, seriesScale(cplx(0.0, 0.5), b));
    }
    qd[n] = a;
  } else {
    // y^[n] = -(i/2) q_{n+1} y^(n)
    MatSeries a = seriesMul(cs(e.qj(n + 1), static_cast<int>(yser.size()) - n),
                            shiftSer(yser, n));
    qd[n] = seriesScale(cplx(0.0, -0.5), a);
  }

  if (r == 0) {
    // order zero: y^[0] = p_0 y
    qd[0] = seriesMul(cs(e.pj(0), static_cast<int>(yser.size())), yser);
    return qd;
  }
  for (int j = (r - 1) / 2; j >= 0; --j) {
    int k = r - j;
    // leave qd[k] empty when the jet is too short to reach it; callers that
    // need it will fail on access
    if (qd[k - 1].size() < 2) {
      qd[k] = MatSeries();
      continue;
    }
    MatSeries term = seriesScale(-1.0, seriesD(qd[k - 1]));
    int len = static_cast<int>(term.size());
    if (!e.pj(j).isZero)
      term = seriesAdd(term, seriesMul(cs(e.pj(j), len), shiftSer(yser, j)));
    if (!e.sj(j + 1).isZero)
      term = seriesAdd(term, seriesScale(cplx(0.0, 0.5),
                                         seriesMul(cs(e.sj(j + 1), len), shiftSer(yser, j + 1))));
    if (j >= 1 && !e.qj(j).isZero)
      term = seriesSub(term, seriesScale(cplx(0.0, 0.5),
                                         seriesMul(cs(e.qj(j), len), shiftSer(yser, j - 1))));
    qd[k] = term;
  }
  return qd;
}

std::vector<MatSeries> quasiDerivFn(const DiffExpr& e, const SmoothFn& f,
                                    double t, cplx lam, int extra) {
  auto jet = f.jet(t, e.r + extra);
  MatSeries yser(jet.size());
  for (size_t k = 0; k < jet.size(); ++k) yser[k] = jet[k];
  return quasiDerivSeries(e, t, lam, yser);
}

cplx dirichletDensity(const DiffExpr& e, double t, cplx lam,
                      const std::vector<Vec>& fjet, const std::vector<Vec>& gjet) {
  cplx acc = 0.0;
  for (int j = 0; j <= e.np(); ++j) {
    if (e.pj(j).isZero) continue;
    acc += inner(e.pj(j)(t, lam) * fjet[j], gjet[j]);
  }
  for (int j = 1; j <= e.nq(); ++j) {
    if (!e.sj(j).isZero)
      acc += cplx(0.0, 0.5) * inner(e.sj(j)(t, lam) * fjet[j], gjet[j - 1]);
    if (!e.qj(j).isZero)
      acc -= cplx(0.0, 0.5) * inner(e.qj(j)(t, lam) * fjet[j - 1], gjet[j]);
  }
  return acc;
}

Mat formMatrix(const DiffExpr& e, double t, cplx lam, int nblocks) {
  int nb = nblocks > 0 ? nblocks : (e.r + 1) / 2 + 1;
  const int d = e.d;
  Mat F = Mat::Zero(nb * d, nb * d);
  for (int j = 0; j < nb && j <= e.np(); ++j)
    if (!e.pj(j).isZero) F.block(j * d, j * d, d, d) = e.pj(j)(t, lam);
  for (int j = 1; j < nb && j <= e.nq(); ++j) {
    if (!e.sj(j).isZero)
      F.block((j - 1) * d, j * d, d, d) = cplx(0.0, 0.5) * e.sj(j)(t, lam);
    if (!e.qj(j).isZero)
      F.block(j * d, (j - 1) * d, d, d) = -cplx(0.0, 0.5) * e.qj(j)(t, lam);
  }
  return F;
}

// ===========================================================================
// Pencil and checks
// ===========================================================================

Pencil Pencil::fromParts(DiffExpr l, DiffExpr m, DiffExpr n, int r,
                         std::vector<cplx> excluded) {
  if (m.r % 2 != 0 && m.r != 0)
    throw std::runtime_error("Pencil: weight expression must have even order");
  Pencil P;
  DiffExpr mL = DiffExpr::scaleLam(m, [](cplx lam) { return -lam; });
  DiffExpr nL = DiffExpr::scale(n, -1.0);
  DiffExpr L = DiffExpr::add(DiffExpr::add(l, mL), nL);
  // embed into the full order-r slot structure
  DiffExpr full = DiffExpr::make(r, l.d);
  P.L = DiffExpr::add(full, L);
  P.l = std::move(l);
  P.m = std::move(m);
  P.n = std::move(n);
  P.excluded = std::move(excluded);
  return P;
}

CheckReport checkDecomposition(const Pencil& P, const std::vector<double>& ts,
                               const std::vector<cplx>& lams) {
  CheckReport rep;
  for (double t : ts)
    for (cplx lam : lams) {
      for (int j = 0; j <= P.L.np(); ++j) {
        double err = (P.L.pj(j)(t, lam) -
                      (P.l.pj(j)(t, lam) - lam * P.m.pj(j)(t, lam) - P.n.pj(j)(t, lam)))
                         .norm();
        rep.worst = std::max(rep.worst, err);
      }
      for (int j = 1; j <= P.L.nq(); ++j) {
        double eq = (P.L.qj(j)(t, lam) -
                     (P.l.qj(j)(t, lam) - lam * P.m.qj(j)(t, lam) - P.n.qj(j)(t, lam)))
                        .norm();
        double es = (P.L.sj(j)(t, lam) -
                     (P.l.sj(j)(t, lam) - lam * P.m.sj(j)(t, lam) - P.n.sj(j)(t, lam)))
                        .norm();
        rep.worst = std::max({rep.worst, eq, es});
      }
    }
  rep.pass = rep.worst <= 1e-10;
  return rep;
}

CheckReport checkSymmetry(const DiffExpr& L, const std::vector<double>& ts,
                          const std::vector<cplx>& lams) {
  CheckReport rep;
  for (double t : ts)
    for (cplx lam : lams) {
      cplx lb = std::conj(lam);
      for (int j = 0; j <= L.np(); ++j)
        rep.worst = std::max(rep.worst,
                             (L.pj(j)(t, lam) - L.pj(j)(t, lb).adjoint()).norm());
      for (int j = 1; j <= L.nq(); ++j)
        rep.worst = std::max(rep.worst,
                             (L.qj(j)(t, lam) - L.sj(j)(t, lb).adjoint()).norm());
    }
  rep.pass = rep.worst <= 1e-10;
  return rep;
}

CheckReport checkNevanlinna(const DiffExpr& L, const std::vector<double>& ts,
                            const std::vector<cplx>& lams) {
  CheckReport rep;
  double tol = 1e-10;
  for (double t : ts)
    for (cplx lam : lams) {
      if (std::abs(lam.imag()) < 1e-12) continue;
      Mat F = formMatrix(L, t, lam);
      double v = maxEig(imPart(F) / lam.imag());
      rep.worst = std::max(rep.worst, v);
      if (v > tol * (1.0 + F.norm())) rep.pass = false;
    }
  if (L.r % 2 == 1) {
    // top q, s must be lambda-free with s = q^*
    int j = L.nq();
    for (double t : ts) {
      Mat q0 = L.qj(j)(t, lams.front());
      for (cplx lam : lams) {
        double a = (L.qj(j)(t, lam) - q0).norm();
        double b = (L.sj(j)(t, lam) - q0.adjoint()).norm();
        if (std::max(a, b) > 1e-10 * (1.0 + q0.norm())) {
          rep.pass = false;
          rep.note = "odd order: top q/s coefficients not lambda-free self-adjoint pair";
        }
      }
    }
  }
  return rep;
}

CheckReport checkWeightDomination(const Pencil& P, const std::vector<double>& ts,
                                  const std::vector<cplx>& lams) {
  CheckReport rep;
  int nb = (P.r() + 1) / 2 + 1;
  for (double t : ts)
    for (cplx lam : lams) {
      if (std::abs(lam.imag()) < 1e-12) continue;
      Mat Mm = formMatrix(P.m, t, 0.0, nb);
      Mat FL = formMatrix(P.L, t, lam, nb);
      Mat gap = -imPart(FL) / lam.imag() - Mm;
      double v1 = -minEig(Mm);
      double v2 = -minEig(gap);
      rep.worst = std::max({rep.worst, v1, v2});
      if (v1 > 1e-10 * (1.0 + Mm.norm()) || v2 > 1e-10 * (1.0 + FL.norm()))
        rep.pass = false;
    }
  return rep;
}

NDominationReport checkNDomination(const Pencil& P, const std::vector<double>& ts,
                                   const std::vector<double>& taus) {
  NDominationReport rep;
  rep.taus = taus;
  int nb = P.r() / 2 + 1;
  for (double tau : taus) {
    double csup = 0.0;
    for (double t : ts) {
      Mat B = formMatrix(P.m, t, 0.0, nb);
      Mat A = imPart(formMatrix(P.n, t, cplx(0.0, tau), nb));
      double scale = 1.0 + A.norm() + B.norm();
      auto feasible = [&](double c) { return minEig(c * B - A) >= -1e-10 * scale; };
      double hi = 1.0;
      while (!feasible(hi) && hi < 1e12) hi *= 2.0;
      if (hi >= 1e12) {
        rep.pass = false;
        rep.note = "Im n(t, i tau) not dominated by m(t)";
        csup = std::numeric_limits<double>::infinity();
        break;
      }
      double lo = 0.0;
      for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        (feasible(mid) ? hi : lo) = mid;
      }
      csup = std::max(csup, hi);
    }
    rep.c.push_back(csup);
  }
  // o(tau): the ratio c(tau)/tau must decay along the ladder
  if (rep.pass && rep.taus.size() >= 2) {
    double first = rep.c.front() / rep.taus.front();
    double last = rep.c.back() / rep.taus.back();
    if (first > 1e-14 && last > 0.5 * first) {
      rep.pass = false;
      rep.note = "sup_t c(t,tau)/tau does not decay";
    }
  }
  return rep;
}

cplx mFormIntegral(const DiffExpr& m, const SmoothFn& f, const SmoothFn& g,
                   double a, double b, int nseg) {
  int half = m.r / 2;
  auto fn = [&](double t) {
    return dirichletDensity(m, t, 0.0, f.jet(t, half), g.jet(t, half));
  };
  return quadGauss(fn, a, b, nseg, cplx(0.0));
}

MNullReport mNullTest(const DiffExpr& m, const SmoothFn& f, double a, double b,
                      double tol) {
  MNullReport rep;
  rep.formValue = std::real(mFormIntegral(m, f, f, a, b));
  double scale = 0.0;
  for (int i = 0; i <= 8; ++i) {
    double t = a + (b - a) * i / 8.0;
    auto qd = quasiDerivFn(m, f, t, 0.0, 1);
    for (int k = m.r / 2; k <= m.r; ++k)
      rep.quasiResidual = std::max(rep.quasiResidual, qd[k][0].norm());
    for (int k = 0; k <= m.r; ++k) scale = std::max(scale, f(t, k).norm());
  }
  rep.isNull = rep.formValue <= tol * (b - a) * (1.0 + scale * scale) &&
               rep.quasiResidual <= std::sqrt(tol) * (1.0 + scale);
  return rep;
}

}  // namespace pencil
