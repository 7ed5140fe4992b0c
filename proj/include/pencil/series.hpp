#ifndef PENCIL_SERIES_HPP
#define PENCIL_SERIES_HPP

#include "pencil/core.hpp"

namespace pencil {

// A "derivative series" at a fixed point t0: element k holds the k-th
// t-derivative of a matrix-valued function at t0.  Products follow the
// Leibniz rule, differentiation is a left shift.  The length of a series
// bounds the number of further differentiations that stay exact.
using MatSeries = std::vector<Mat>;

inline MatSeries seriesConst(const Mat& A, int len) {
  MatSeries s(len, Mat::Zero(A.rows(), A.cols()));
  if (len > 0) s[0] = A;
  return s;
}

inline MatSeries seriesZero(int rows, int cols, int len) {
  return MatSeries(len, Mat::Zero(rows, cols));
}

// d/dt: drop the leading element.
inline MatSeries seriesD(const MatSeries& a) {
  if (a.empty()) throw std::runtime_error("seriesD: series exhausted");
  return MatSeries(a.begin() + 1, a.end());
}

inline MatSeries seriesAdd(const MatSeries& a, const MatSeries& b) {
  size_t len = std::min(a.size(), b.size());
  MatSeries out(len);
  for (size_t k = 0; k < len; ++k) out[k] = a[k] + b[k];
  return out;
}

inline MatSeries seriesSub(const MatSeries& a, const MatSeries& b) {
  size_t len = std::min(a.size(), b.size());
  MatSeries out(len);
  for (size_t k = 0; k < len; ++k) out[k] = a[k] - b[k];
  return out;
}

inline MatSeries seriesScale(cplx c, const MatSeries& a) {
  MatSeries out(a.size());
  for (size_t k = 0; k < a.size(); ++k) out[k] = c * a[k];
  return out;
}

// (A B)^(k) = sum_j C(k,j) A^(j) B^(k-j).
inline MatSeries seriesMul(const MatSeries& a, const MatSeries& b) {
  if (a.empty() || b.empty()) throw std::runtime_error("seriesMul: empty series");
  size_t len = std::min(a.size(), b.size());
  MatSeries out(len, Mat::Zero(a[0].rows(), b[0].cols()));
  std::vector<std::vector<double>> C(len, std::vector<double>(len, 0.0));
  for (size_t k = 0; k < len; ++k) {
    C[k][0] = 1.0;
    for (size_t j = 1; j <= k; ++j)
      C[k][j] = C[k - 1][j - 1] + (j < k ? C[k - 1][j] : 0.0);
  }
  for (size_t k = 0; k < len; ++k)
    for (size_t j = 0; j <= k; ++j) out[k] += C[k][j] * (a[j] * b[k - j]);
  return out;
}

}  // namespace pencil

#endif  // PENCIL_SERIES_HPP
