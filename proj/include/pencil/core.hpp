#ifndef PENCIL_CORE_HPP
#define PENCIL_CORE_HPP

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace pencil {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline constexpr cplx I1{0.0, 1.0};

// Hermitian real/imaginary parts: A = Re A + i Im A with Re A, Im A Hermitian.
inline Mat rePart(const Mat& A) { return 0.5 * (A + A.adjoint()); }
inline Mat imPart(const Mat& A) { return (A - A.adjoint()) / cplx(0.0, 2.0); }

// Inner product (a,b) = b* a (conjugation on the second argument).
inline cplx inner(const Vec& a, const Vec& b) { return (b.adjoint() * a)(0); }

// Eigenvalue range of a (numerically) Hermitian matrix.
inline double minEig(const Mat& A) {
  Eigen::SelfAdjointEigenSolver<Mat> es(rePart(A));
  return es.eigenvalues().minCoeff();
}
inline double maxEig(const Mat& A) {
  Eigen::SelfAdjointEigenSolver<Mat> es(rePart(A));
  return es.eigenvalues().maxCoeff();
}

// Positive semidefiniteness up to a norm-relative tolerance.
inline bool isPSD(const Mat& A, double tol = 1e-10) {
  return minEig(A) >= -tol * (1.0 + A.norm());
}

// Signature (n_minus, n_zero, n_plus) of a Hermitian matrix.
struct Inertia {
  int neg = 0, zero = 0, pos = 0;
};
inline Inertia inertia(const Mat& A, double tol = 1e-10) {
  Eigen::SelfAdjointEigenSolver<Mat> es(rePart(A));
  Inertia in;
  const double thr = tol * (1.0 + A.norm());
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    double v = es.eigenvalues()(i);
    if (v < -thr)
      ++in.neg;
    else if (v > thr)
      ++in.pos;
    else
      ++in.zero;
  }
  return in;
}

// Rank with a norm-relative SVD threshold.
inline int numericalRank(const Mat& A, double tol = 1e-8) {
  if (A.size() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(A);
  const auto& sv = svd.singularValues();
  const double top = sv.size() > 0 ? sv(0) : 0.0;
  double thr = tol * (1.0 + top);
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > thr) ++r;
  return r;
}

// ---------------------------------------------------------------------------
// Smooth vector-valued test functions with derivatives of every order.
// ---------------------------------------------------------------------------
struct SmoothFn {
  int d = 1;
  std::function<Vec(double t, int k)> deriv;  // k-th derivative at t

  Vec operator()(double t, int k = 0) const { return deriv(t, k); }

  // Jet (f, f', ..., f^(K)) at t.
  std::vector<Vec> jet(double t, int K) const {
    std::vector<Vec> out(K + 1);
    for (int k = 0; k <= K; ++k) out[k] = deriv(t, k);
    return out;
  }

  // f(t) = (sum_j c_j t^j) * exp(g t); covers polynomials (g = 0) and waves.
  static SmoothFn polyExp(std::vector<Vec> coeffs, cplx g = 0.0);

  // Gaussian bump a * exp(-((t-c)/w)^2 / 2); effectively compactly supported.
  static SmoothFn gaussian(Vec amplitude, double center, double width);

  static SmoothFn sum(SmoothFn a, SmoothFn b);
  static SmoothFn zero(int d);
};

// Scalar conveniences (d = 1).
SmoothFn scalarPolyExp(std::vector<cplx> coeffs, cplx g = 0.0);

// ---------------------------------------------------------------------------
// Composite 5-point Gauss-Legendre quadrature.
// ---------------------------------------------------------------------------
namespace gauss5 {
inline constexpr double xs[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                 0.5384693101056831, 0.9061798459386640};
inline constexpr double ws[5] = {0.2369268850561891, 0.4786286704993665,
                                 0.5688888888888889, 0.4786286704993665,
                                 0.2369268850561891};
}  // namespace gauss5

// Integrate fn over [a,b] split into nseg equal segments (a > b allowed).
template <typename T, typename F>
T quadGauss(F&& fn, double a, double b, int nseg, const T& zero) {
  T acc = zero;
  double h = (b - a) / nseg;
  for (int s = 0; s < nseg; ++s) {
    double c = a + (s + 0.5) * h;
    for (int g = 0; g < 5; ++g)
      acc += (0.5 * h * gauss5::ws[g]) * fn(c + 0.5 * h * gauss5::xs[g]);
  }
  return acc;
}

// Integrate over explicit breakpoints (5-point Gauss on each subinterval).
template <typename T, typename F>
T quadGaussBreaks(F&& fn, const std::vector<double>& breaks, const T& zero) {
  T acc = zero;
  for (size_t s = 0; s + 1 < breaks.size(); ++s) {
    double a = breaks[s], b = breaks[s + 1], h = b - a, c = 0.5 * (a + b);
    for (int g = 0; g < 5; ++g)
      acc += (0.5 * h * gauss5::ws[g]) * fn(c + 0.5 * h * gauss5::xs[g]);
  }
  return acc;
}

}  // namespace pencil

#endif  // PENCIL_CORE_HPP
