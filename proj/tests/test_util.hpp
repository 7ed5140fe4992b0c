#ifndef PENCIL_TEST_UTIL_HPP
#define PENCIL_TEST_UTIL_HPP

#include <random>

#include "pencil/reduce.hpp"

namespace testutil {

using namespace pencil;

inline Mat randMat(std::mt19937& rng, int d, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Mat A(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) A(i, j) = scale * cplx(u(rng), u(rng));
  return A;
}

inline Mat randHerm(std::mt19937& rng, int d, double scale = 1.0) {
  Mat A = randMat(rng, d, scale);
  return 0.5 * (A + A.adjoint());
}

inline Vec randVec(std::mt19937& rng, int d, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vec v(d);
  for (int i = 0; i < d; ++i) v(i) = scale * cplx(u(rng), u(rng));
  return v;
}

// degree-1 t-polynomial coefficient, optionally Hermitian-valued, optionally
// shifted by 2I to keep it invertible
inline Coefficient randPoly(std::mt19937& rng, int d, bool herm,
                            double scale = 0.5, bool addId = false) {
  Mat c0 = herm ? randHerm(rng, d, scale) : randMat(rng, d, scale);
  Mat c1 = herm ? randHerm(rng, d, 0.3 * scale) : randMat(rng, d, 0.3 * scale);
  if (addId) c0 += 2.0 * Mat::Identity(d, d);
  return Coefficient::tpoly({c0, c1});
}

// generic (non-symmetric) expression with invertible top coefficients
inline DiffExpr randExpr(std::mt19937& rng, int r, int d) {
  DiffExpr e = DiffExpr::make(r, d);
  for (int j = 0; j <= e.np(); ++j)
    e.p[j] = randPoly(rng, d, false, 0.5, j == e.np() && r % 2 == 0);
  for (int j = 1; j <= e.nq(); ++j) {
    e.q[j] = randPoly(rng, d, false, 0.5, j == e.nq() && r % 2 == 1);
    e.s[j] = randPoly(rng, d, false, 0.5, j == e.nq() && r % 2 == 1);
  }
  return e;
}

// formally selfadjoint expression (p Hermitian, s = q^*)
inline DiffExpr randSymmetricExpr(std::mt19937& rng, int r, int d) {
  DiffExpr e = DiffExpr::make(r, d);
  for (int j = 0; j <= e.np(); ++j)
    e.p[j] = randPoly(rng, d, true, 0.5, j == e.np() && r % 2 == 0);
  for (int j = 1; j <= e.nq(); ++j) {
    e.q[j] = randPoly(rng, d, false, 0.5, j == e.nq() && r % 2 == 1);
    e.s[j] = e.q[j].adjointC();
  }
  return e;
}

// positive weight expression of even order s
inline DiffExpr randWeight(std::mt19937& rng, int s, int d) {
  DiffExpr m = DiffExpr::make(s, d);
  for (int j = 0; j <= m.np(); ++j) {
    Mat base = Mat::Identity(d, d) * (1.0 + 0.5 * j);
    Mat pert = randHerm(rng, d, 0.1);
    m.p[j] = Coefficient::tpoly({base + pert});
  }
  return m;
}

// pencil l - lambda m (Nevanlinna by construction)
inline Pencil randPencil(std::mt19937& rng, int r, int d, int s = -1) {
  DiffExpr l = randSymmetricExpr(rng, r, d);
  if (s < 0) s = r - r % 2;
  DiffExpr m = randWeight(rng, s, d);
  return Pencil::fromParts(l, m, DiffExpr::make(0, d), r);
}

inline SmoothFn randSmooth(std::mt19937& rng, int d) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return SmoothFn::polyExp({randVec(rng, d), randVec(rng, d), randVec(rng, d)},
                           cplx(0.4 * u(rng), 0.7 * u(rng)));
}

// vector jet -> series of d x 1 matrices
inline MatSeries toSeries(const std::vector<Vec>& jet) {
  MatSeries s(jet.size());
  for (size_t k = 0; k < jet.size(); ++k) s[k] = jet[k];
  return s;
}

// Richardson central difference of a vector-valued function
template <typename F>
Vec fdDeriv(F&& f, double t, double h = 1e-3) {
  Vec d1 = (f(t + h) - f(t - h)) / (2.0 * h);
  Vec d2 = (f(t + h / 2) - f(t - h / 2)) / h;
  return (4.0 * d2 - d1) / 3.0;
}

}  // namespace testutil

#endif
