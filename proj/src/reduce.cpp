#include "pencil/reduce.hpp"

namespace pencil {

namespace {

// Block writer helpers on a dense N x N matrix with d x d blocks.
struct Blocks {
  Mat& A;
  int d;
  void set(int i, int j, const Mat& B) { A.block(i * d, j * d, d, d) = B; }
  void add(int i, int j, const Mat& B) { A.block(i * d, j * d, d, d) += B; }
};

Mat idBlock(int d) { return Mat::Identity(d, d); }

// Phi: col{y^(0..r-1)} -> canonical state, for an arbitrary expression e.
Mat phiMatrix(const DiffExpr& e, double t, cplx lam) {
  const int r = e.r, d = e.d, N = r * d, n = r / 2;
  if (r == 1) return Mat::Identity(d, d);
  // identity jet: yser[j] = [0 ... I ... 0] (block j)
  MatSeries yser(r);
  for (int j = 0; j < r; ++j) {
    yser[j] = Mat::Zero(d, N);
    yser[j].block(0, j * d, d, d) = idBlock(d);
  }
  auto qd = quasiDerivSeries(e, t, lam, yser);
  Mat Phi = Mat::Zero(N, N);
  for (int j = 0; j < n; ++j) Phi.block(j * d, j * d, d, d) = idBlock(d);
  for (int jj = 0; jj < n; ++jj) Phi.block((n + jj) * d, 0, d, N) = qd[r - 1 - jj][0];
  if (r % 2 == 1)  // last component -i y^(n)
    Phi.block((r - 1) * d, n * d, d, d) = -I1 * idBlock(d);
  return Phi;
}

// Permutation taking the ascending jet stack to col{0..n-1, r-1..n} (even r).
Mat permReorder(int r, int d) {
  const int n = r / 2, N = r * d;
  Mat P = Mat::Zero(N, N);
  for (int i = 0; i < n; ++i) P.block(i * d, i * d, d, d) = idBlock(d);
  for (int jj = 0; jj < n; ++jj)
    P.block((n + jj) * d, (r - 1 - jj) * d, d, d) = idBlock(d);
  return P;
}

}  // namespace

Mat weightBlocks(const DiffExpr& m, int r, int d, double t, cplx lamE) {
  const int N = r * d, n = r / 2;
  const bool even = (r % 2 == 0);
  Mat A = Mat::Zero(N, N);
  Blocks B{A, d};
  auto P = [&](int j) { return m.pj(j)(t, lamE); };
  auto Qc = [&](int j) { return m.qj(j)(t, lamE); };
  auto Sc = [&](int j) { return m.sj(j)(t, lamE); };
  // m11 (n x n)
  for (int j = 0; j < n; ++j) {
    if (!m.pj(j).isZero) B.set(j, j, P(j));
    if (j + 1 < n) {
      if (!m.qj(j + 1).isZero) B.set(j + 1, j, -cplx(0.0, 0.5) * Qc(j + 1));
      if (!m.sj(j + 1).isZero) B.set(j, j + 1, cplx(0.0, 0.5) * Sc(j + 1));
    }
  }
  if (even) {
    if (n >= 1) {
      if (!m.sj(n).isZero) B.set(n - 1, 2 * n - 1, cplx(0.0, 0.5) * Sc(n));
      if (!m.qj(n).isZero) B.set(2 * n - 1, n - 1, -cplx(0.0, 0.5) * Qc(n));
    }
    if (!m.pj(n).isZero) B.set(2 * n - 1, 2 * n - 1, P(n));
  } else {
    // second half has n+1 slots; last slot is the (-i y^(n)) component
    if (n >= 1) {
      if (!m.sj(n).isZero) B.set(n - 1, r - 1, -0.5 * Sc(n));
      if (!m.qj(n).isZero) B.set(r - 1, n - 1, -0.5 * Qc(n));
    }
    if (!m.pj(n).isZero) B.set(r - 1, r - 1, P(n));
  }
  return A;
}

Mat weightMatrix(const DiffExpr& e, cplx lamE, const DiffExpr& m, double t) {
  const int r = e.r, d = e.d;
  if (r % 2 == 1) return weightBlocks(m, r, d, t, lamE);
  Mat C = phiMatrix(e, t, lamE) * permReorder(r, d).transpose();
  Mat Ci = C.inverse();
  return Ci.adjoint() * weightBlocks(m, r, d, t, lamE) * Ci;
}

// ===========================================================================
// CanonicalSystem
// ===========================================================================

CanonicalSystem buildCanonical(const Pencil& P) {
  CanonicalSystem sys;
  sys.P = P;
  sys.r = P.r();
  sys.d = P.d();
  sys.N = sys.r * sys.d;
  sys.s = P.s();
  sys.n = sys.r / 2;
  sys.even = (sys.r % 2 == 0);
  return sys;
}

Mat CanonicalSystem::Q(double t, cplx lam, int k) const {
  Mat A = Mat::Zero(N, N);
  if (even) {
    if (k == 0) {
      A.block(0, n * d, n * d, n * d) = I1 * Mat::Identity(n * d, n * d);
      A.block(n * d, 0, n * d, n * d) = -I1 * Mat::Identity(n * d, n * d);
    }
    return A;
  }
  if (n > 0 && k == 0) {
    A.block(0, n * d, n * d, n * d) = I1 * Mat::Identity(n * d, n * d);
    A.block(n * d, 0, n * d, n * d) = -I1 * Mat::Identity(n * d, n * d);
  }
  A.block((r - 1) * d, (r - 1) * d, d, d) = P.L.qj(n + 1)(t, lam, k);
  return A;
}

Mat CanonicalSystem::S(double t, cplx lam, int k) const {
  Mat A = Q(t, lam, k);
  if (!even) A.block((r - 1) * d, (r - 1) * d, d, d) = P.L.sj(n + 1)(t, lam, k);
  return A;
}

Mat CanonicalSystem::M0(double t, cplx lam) const {
  return cplx(0.0, 0.5) * (Q(t, lam) + S(t, lam));
}

Mat CanonicalSystem::H(double t, cplx lam) const {
  Mat A = Mat::Zero(N, N);
  Blocks B{A, d};
  auto p = [&](int j) { return P.L.pj(j)(t, lam); };
  auto q = [&](int j) { return P.L.qj(j)(t, lam); };
  auto sc = [&](int j) { return P.L.sj(j)(t, lam); };
  if (even) {
    Mat pninv = p(n).inverse();
    for (int i = 0; i + 1 < n; ++i) B.set(i, i, -p(i));
    B.set(n - 1, n - 1, 0.25 * sc(n) * pninv * q(n) - p(n - 1));
    for (int i = 0; i + 1 < n; ++i) {
      B.set(i + 1, i, cplx(0.0, 0.5) * q(i + 1));
      B.set(i, i + 1, -cplx(0.0, 0.5) * sc(i + 1));
    }
    // h12 (rows 0..n-1, cols n..2n-1)
    for (int i = 0; i + 1 < n; ++i) B.set(i + 1, n + i, idBlock(d));
    B.set(n - 1, 2 * n - 1, -cplx(0.0, 0.5) * sc(n) * pninv);
    // h21 (rows n..2n-1, cols 0..n-1)
    for (int i = 0; i + 1 < n; ++i) B.set(n + i, i + 1, idBlock(d));
    B.set(2 * n - 1, n - 1, cplx(0.0, 0.5) * pninv * q(n));
    // h22
    B.set(2 * n - 1, 2 * n - 1, pninv);
    return A;
  }
  if (n == 0) return -p(0);
  for (int i = 0; i < n; ++i) B.set(i, i, -p(i));
  for (int i = 0; i + 1 < n; ++i) {
    B.set(i + 1, i, cplx(0.0, 0.5) * q(i + 1));
    B.set(i, i + 1, -cplx(0.0, 0.5) * sc(i + 1));
  }
  // h12 (rows 0..n-1, cols n..2n): identity run + (1/2) s_n tail
  for (int i = 1; i < n; ++i) B.set(i, n + i - 1, idBlock(d));
  B.set(n - 1, 2 * n, 0.5 * sc(n));
  // h21 (rows n..2n, cols 0..n-1)
  for (int i = 0; i + 1 < n; ++i) B.set(n + i, i + 1, idBlock(d));
  B.set(2 * n, n - 1, 0.5 * q(n));
  // h22 (rows n..2n, cols n..2n)
  B.set(2 * n, 2 * n - 1, -I1 * idBlock(d));
  B.set(2 * n - 1, 2 * n, I1 * idBlock(d));
  B.set(2 * n, 2 * n, -p(n));
  return A;
}

Mat CanonicalSystem::W(double t, cplx lam) const {
  return weightMatrix(P.L, std::conj(lam), P.m, t);
}

Mat CanonicalSystem::Wnev(double t, cplx lam) const {
  if (std::abs(lam.imag()) < 1e-14)
    throw std::runtime_error("Wnev: real lambda");
  DiffExpr nu = DiffExpr::scale(P.L.imE(), cplx(-1.0 / lam.imag()));
  return weightMatrix(P.L, lam, nu, t);
}

Mat CanonicalSystem::G() const { return rePart(Q(0.0, I1)); }

Mat CanonicalSystem::Cmat(double t, cplx lam) const {
  if (!even) throw std::runtime_error("Cmat: defined for even order only");
  return phiMatrix(P.L, t, lam) * permReorder(r, d).transpose();
}

Mat CanonicalSystem::liftMatrix(double t, cplx lam) const {
  return phiMatrix(P.L, t, lam);
}

Vec CanonicalSystem::liftCorrection(double t, const SmoothFn& f) const {
  Vec corr = Vec::Zero(N);
  if (r == 1) return corr;
  auto qd = quasiDerivFn(P.m, f, t, 0.0, 1);
  for (int jj = 0; jj < n; ++jj) {
    int k = s - 1 - jj;  // f^[s-j], j = jj+1
    if (k >= (s + 1) / 2 && k >= 0)
      corr.segment((n + jj) * d, d) = qd[k][0].col(0);
  }
  return corr;
}

Vec CanonicalSystem::liftState(double t, cplx lam, const std::vector<Vec>& yjet,
                               const SmoothFn* f) const {
  Vec stacked(N);
  for (int j = 0; j < r; ++j) stacked.segment(j * d, d) = yjet[j];
  Vec x = liftMatrix(t, lam) * stacked;
  if (f) x -= liftCorrection(t, *f);
  return x;
}

std::vector<Vec> CanonicalSystem::recoverJet(double t, cplx lam, const Vec& state,
                                             const SmoothFn* f) const {
  Vec v = state;
  if (f) v += liftCorrection(t, *f);
  Vec stacked = liftMatrix(t, lam).inverse() * v;
  std::vector<Vec> jet(r);
  for (int j = 0; j < r; ++j) jet[j] = stacked.segment(j * d, d);
  return jet;
}

Vec CanonicalSystem::Fvec(double t, cplx lam, const SmoothFn& f) const {
  cplx lamE = std::conj(lam);
  Vec F = Vec::Zero(N);
  if (r == 1) {
    F = f(t);
    return F;
  }
  if (even && s == r) {
    // blocks 0..n-1: f^(j); blocks n..2n-1: f^[r-1..n](t | l_{lamE})
    for (int j = 0; j < n; ++j) F.segment(j * d, d) = f(t, j);
    auto qd = quasiDerivFn(P.L, f, t, lamE, 0);
    for (int jj = 0; jj < n; ++jj)
      F.segment((n + jj) * d, d) = qd[r - 1 - jj][0].col(0);
    return F;
  }
  if (!even && s == r - 1 && s > 0) {
    for (int j = 0; j < n; ++j) F.segment(j * d, d) = f(t, j);
    F.segment((r - 1) * d, d) = -I1 * f(t, n);
    return F;
  }
  for (int j = 0; j <= s / 2; ++j) F.segment(j * d, d) = f(t, j);
  return F;
}

Vec CanonicalSystem::liftRhs(double t, cplx lam, const SmoothFn& f) const {
  Vec out = Vec::Zero(N);
  if (s == 0) {
    out.segment(0, d) = P.m.pj(0)(t, 0.0) * f(t);
    return out;
  }
  auto qd = quasiDerivFn(P.m, f, t, 0.0, 1);
  auto val = [&](int k) -> Vec { return qd[k][0].col(0); };
  auto der = [&](int k) -> Vec { return qd[k][1].col(0); };
  if (even && s == r) {
    for (int j = 0; j < n; ++j)
      out.segment(j * d, d) = val(s - j) + der(s - j - 1);
    Vec tail = Vec::Zero(N);
    tail.segment((r - 1) * d, d) = val(n);
    out += H(t, lam) * tail;
    return out;
  }
  if (!even && s == r - 1) {
    for (int j = 0; j < s / 2; ++j)
      out.segment(j * d, d) = val(s - j) + der(s - j - 1);
    out.segment((r - 1) * d, d) = -I1 * val(s / 2);
    return out;
  }
  for (int j = 0; j < s / 2; ++j)
    out.segment(j * d, d) = val(s - j) + der(s - j - 1);
  out.segment((s / 2) * d, d) = val(s / 2);
  return out;
}

Vec CanonicalSystem::liftRhsNaive(double t, cplx lam, const SmoothFn& f) const {
  return W(t, lam) * Fvec(t, lam, f);
}

CheckReport checkImHIdentity(const CanonicalSystem& sys,
                             const std::vector<double>& ts,
                             const std::vector<cplx>& lams) {
  CheckReport rep;
  for (double t : ts)
    for (cplx lam : lams) {
      if (std::abs(lam.imag()) < 1e-12) continue;
      Mat lhs = imPart(sys.H(t, lam));
      Mat rhs = lam.imag() * sys.Wnev(t, lam);
      double rel = (lhs - rhs).norm() / (1.0 + lhs.norm());
      rep.worst = std::max(rep.worst, rel);
    }
  rep.pass = rep.worst <= 1e-10;
  return rep;
}

std::function<Vec(double, const Vec&)> companionField(const Pencil& P, cplx lam,
                                                      const SmoothFn* f) {
  int r = P.r(), d = P.d();
  DiffExpr L = P.L, m = P.m;
  SmoothFn ff = f ? *f : SmoothFn::zero(d);
  bool hasF = (f != nullptr);
  return [=](double t, const Vec& z) -> Vec {
    auto A = scalarize(L, t, lam);
    Vec rhs = hasF ? exprApplyFn(m, ff, t, 0.0) : Vec::Zero(d).eval();
    for (int k = 0; k < r; ++k) rhs -= A[k] * z.segment(k * d, d);
    Vec dz(r * d);
    for (int k = 0; k + 1 < r; ++k) dz.segment(k * d, d) = z.segment((k + 1) * d, d);
    dz.segment((r - 1) * d, d) = A[r].inverse() * rhs;
    return dz;
  };
}

std::function<Vec(double, const Vec&)> canonicalField(const CanonicalSystem& sys,
                                                      cplx lam,
                                                      const SmoothFn* f) {
  SmoothFn ff = f ? *f : SmoothFn::zero(sys.d);
  bool hasF = (f != nullptr);
  return [=](double t, const Vec& x) -> Vec {
    Mat M = sys.M0(t, lam);
    Vec rhs = sys.H(t, lam) * x - cplx(0.0, 0.5) * (sys.Q(t, lam, 1) * x);
    if (hasF) rhs += sys.liftRhs(t, lam, ff);
    return M.inverse() * rhs;
  };
}

}  // namespace pencil
