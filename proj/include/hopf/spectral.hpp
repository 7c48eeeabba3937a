#ifndef HOPF_SPECTRAL_HPP
#define HOPF_SPECTRAL_HPP

#include <Eigen/Eigenvalues>

#include <cmath>

#include "hopf/core.hpp"

namespace hopf {

/// Symmetric positive definite matrix kept as A = P diag(eigenvalues) P^T.
///
/// Every algorithm that touches such a matrix (quadratic prox, ellipsoid
/// projection, the norm sqrt(<p, A p>)) works in the eigenbasis, so the
/// decomposition is done once at construction.
template <typename Scalar>
class SpectralMatrix {
 public:
  SpectralMatrix(Vector<Scalar> eigenvalues, Matrix<Scalar> orthogonal_factor)
      : eigenvalues_(std::move(eigenvalues)), factor_(std::move(orthogonal_factor)) {
    const Index n = eigenvalues_.size();
    if (n == 0) throw InvalidArgument("spectral matrix: empty");
    if (factor_.rows() != n || factor_.cols() != n)
      throw InvalidArgument("spectral matrix: factor must be n x n");
    if ((eigenvalues_.array() <= Scalar(0)).any() || !eigenvalues_.allFinite())
      throw InvalidArgument("spectral matrix: eigenvalues must be positive");
    const Matrix<Scalar> gram = factor_.transpose() * factor_;
    const Scalar err = (gram - Matrix<Scalar>::Identity(n, n)).cwiseAbs().maxCoeff();
    if (!(err <= Scalar(1e-10)))
      throw InvalidArgument("spectral matrix: factor is not orthogonal");
  }

  static SpectralMatrix diagonal(Vector<Scalar> eigenvalues) {
    const Index n = eigenvalues.size();
    return SpectralMatrix(std::move(eigenvalues), Matrix<Scalar>::Identity(n, n));
  }

  // Raw-matrix ingestion; the matrix must be symmetric positive definite.
  static SpectralMatrix from_matrix(const Matrix<Scalar>& a) {
    if (a.rows() != a.cols() || a.rows() == 0)
      throw InvalidArgument("spectral matrix: matrix must be square and nonempty");
    const Scalar asym = (a - a.transpose()).cwiseAbs().maxCoeff();
    if (!(asym <= Scalar(1e-10) * std::max(Scalar(1), a.cwiseAbs().maxCoeff())))
      throw InvalidArgument("spectral matrix: matrix is not symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(a);
    if (solver.info() != Eigen::Success)
      throw InvalidArgument("spectral matrix: eigen decomposition failed");
    return SpectralMatrix(solver.eigenvalues(), solver.eigenvectors());
  }

  Index dimension() const { return eigenvalues_.size(); }
  const Vector<Scalar>& eigenvalues() const { return eigenvalues_; }
  const Matrix<Scalar>& orthogonal_factor() const { return factor_; }

  bool is_diagonal() const {
    return factor_.isIdentity(Scalar(0));
  }

  Matrix<Scalar> reconstruct() const {
    return factor_ * eigenvalues_.asDiagonal() * factor_.transpose();
  }

  // P^T z, skipped when P is the identity.
  template <typename Derived>
  Vector<Scalar> to_eigenbasis(const Eigen::MatrixBase<Derived>& z) const {
    check_dimension(dimension(), z.size());
    if (is_diagonal()) return z;
    return factor_.transpose() * z;
  }

  template <typename Derived>
  Vector<Scalar> from_eigenbasis(const Eigen::MatrixBase<Derived>& z) const {
    check_dimension(dimension(), z.size());
    if (is_diagonal()) return z;
    return factor_ * z;
  }

  template <typename Derived>
  Vector<Scalar> apply(const Eigen::MatrixBase<Derived>& z) const {
    return from_eigenbasis((eigenvalues_.array() * to_eigenbasis(z).array()).matrix());
  }

  template <typename Derived>
  Vector<Scalar> apply_inverse(const Eigen::MatrixBase<Derived>& z) const {
    return from_eigenbasis((to_eigenbasis(z).array() / eigenvalues_.array()).matrix());
  }

  template <typename Derived>
  Scalar quadratic_form(const Eigen::MatrixBase<Derived>& z) const {
    const Vector<Scalar> y = to_eigenbasis(z);
    return (eigenvalues_.array() * y.array().square()).sum();
  }

  SpectralMatrix scaled(Scalar factor) const {
    if (!(factor > Scalar(0))) throw InvalidArgument("spectral matrix: scale must be positive");
    return SpectralMatrix(eigenvalues_ * factor, factor_);
  }

 private:
  Vector<Scalar> eigenvalues_;
  Matrix<Scalar> factor_;
};

}  // namespace hopf

#endif  // HOPF_SPECTRAL_HPP
