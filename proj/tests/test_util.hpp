#ifndef HOPF_TEST_UTIL_HPP
#define HOPF_TEST_UTIL_HPP

#include <random>

#include "hopf/core.hpp"

namespace hopf::test {

using Vec = Vector<double>;
using Mat = Matrix<double>;

inline Vec uniform(std::mt19937_64& gen, Index n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vec v(n);
  for (Index i = 0; i < n; ++i) v(i) = u(gen);
  return v;
}

inline double uniform(std::mt19937_64& gen, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(gen);
}

inline Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

// Random orthogonal matrix from the QR factor of a Gaussian matrix.
inline Mat random_orthogonal(std::mt19937_64& gen, Index n) {
  std::normal_distribution<double> g;
  Mat m(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) m(i, j) = g(gen);
  Eigen::HouseholderQR<Mat> qr(m);
  return qr.householderQ() * Mat::Identity(n, n);
}

template <typename F>
Vec central_difference(F&& f, const Vec& x, double h) {
  Vec g(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    Vec a = x, b = x;
    a(i) += h;
    b(i) -= h;
    g(i) = (f(a) - f(b)) / (2 * h);
  }
  return g;
}

}  // namespace hopf::test

#endif  // HOPF_TEST_UTIL_HPP
