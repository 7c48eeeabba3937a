#ifndef HOPF_CORE_HPP
#define HOPF_CORE_HPP

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace hopf {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Index = Eigen::Index;

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(Index expected, Index got)
      : Error("dimension mismatch: expected " + std::to_string(expected) +
              ", got " + std::to_string(got)) {}
};

// Gradient requested at the origin of a 1-homogeneous function.
class ZeroInput : public Error {
 public:
  using Error::Error;
};

// Gradient requested where the function has a kink; the subdifferential is
// not a singleton so no control/gradient is reported.
class NonDifferentiable : public Error {
 public:
  using Error::Error;
};

// An inner iterative routine (Newton, bracketing) failed to converge.
class ConvergenceFailure : public Error {
 public:
  using Error::Error;
};

inline void check_dimension(Index expected, Index got) {
  if (expected != got) throw DimensionMismatch(expected, got);
}

}  // namespace hopf

#endif  // HOPF_CORE_HPP
