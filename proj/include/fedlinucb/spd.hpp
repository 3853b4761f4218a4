#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

namespace fedlinucb {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Raised when a matrix that must be symmetric positive definite is not.
class NumericalDomainError : public std::domain_error {
 public:
  explicit NumericalDomainError(const std::string& what) : std::domain_error(what) {}
};

/// Raised on vector/matrix size disagreement.
class DimensionError : public std::invalid_argument {
 public:
  explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

/// Relative tolerance used for symmetry checks on Gram matrices.
inline constexpr double kSymmetryTolerance = 1e-9;

/// Immutable SPD matrix with its pivoted LDL^T factors, computed once at
/// construction. Determinant, inverse norm and solve go through the factors;
/// no explicit inverse is formed.
class SpdMatrix {
 public:
  /// Throws NumericalDomainError if `m` is not symmetric or not positive definite.
  explicit SpdMatrix(Matrix m);

  static SpdMatrix scaled_identity(Eigen::Index dim, double scale);

  [[nodiscard]] Eigen::Index dim() const { return matrix_.rows(); }
  [[nodiscard]] const Matrix& matrix() const { return matrix_; }

  [[nodiscard]] double det() const;
  [[nodiscard]] double log_det() const;

  /// sqrt(x^T M^{-1} x) via one unit-triangular solve.
  [[nodiscard]] double inv_norm(const Vector& x) const;

  /// M^{-1} b.
  [[nodiscard]] Vector solve(const Vector& b) const;

 private:
  Matrix matrix_;
  Eigen::LDLT<Matrix> ldlt_;
};

double spd_det(const SpdMatrix& m);
double inv_norm(const SpdMatrix& m, const Vector& x);
Vector solve_estimate(const SpdMatrix& m, const Vector& b);

/// Determinant of a symmetric PSD matrix that may be singular (returns 0 then).
double psd_det(const Matrix& m);

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Matrix& m);

void require_dim(const Vector& x, Eigen::Index dim, const char* what);

}  // namespace fedlinucb
