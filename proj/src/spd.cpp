#include "fedlinucb/spd.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace fedlinucb {

namespace {

void require_symmetric(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    std::ostringstream os;
    os << "SpdMatrix: expected a nonempty square matrix, got " << m.rows() << "x" << m.cols();
    throw DimensionError(os.str());
  }
  if (!m.allFinite()) {
    throw NumericalDomainError("SpdMatrix: non-finite entry");
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTolerance * scale) {
    std::ostringstream os;
    os << "SpdMatrix: matrix is not symmetric (max asymmetry " << asym << ")";
    throw NumericalDomainError(os.str());
  }
}

}  // namespace

SpdMatrix::SpdMatrix(Matrix m) : matrix_(std::move(m)) {
  require_symmetric(matrix_);
  ldlt_.compute(matrix_);
  if (ldlt_.info() != Eigen::Success) {
    throw NumericalDomainError("SpdMatrix: factorization failed (matrix not positive definite)");
  }
  const Eigen::VectorXd diag = ldlt_.vectorD();
  if ((diag.array() <= 0.0).any() || !diag.allFinite()) {
    throw NumericalDomainError("SpdMatrix: matrix is not positive definite");
  }
}

SpdMatrix SpdMatrix::scaled_identity(Eigen::Index dim, double scale) {
  if (dim < 1) {
    throw DimensionError("SpdMatrix::scaled_identity: dim must be >= 1");
  }
  if (!(scale > 0.0)) {
    throw NumericalDomainError("SpdMatrix::scaled_identity: scale must be positive");
  }
  return SpdMatrix(Matrix::Identity(dim, dim) * scale);
}

double SpdMatrix::det() const {
  const Eigen::VectorXd& diag = ldlt_.vectorD();
  double d = 1.0;
  for (Eigen::Index i = 0; i < diag.size(); ++i) {
    d *= diag[i];
  }
  return d;
}

double SpdMatrix::log_det() const {
  return ldlt_.vectorD().array().log().sum();
}

double SpdMatrix::inv_norm(const Vector& x) const {
  require_dim(x, dim(), "inv_norm");
  // x^T P^T L^-T D^-1 L^-1 P x
  Vector y = ldlt_.transpositionsP() * x;
  ldlt_.matrixL().solveInPlace(y);
  return std::sqrt((y.array().square() / ldlt_.vectorD().array()).sum());
}

Vector SpdMatrix::solve(const Vector& b) const {
  require_dim(b, dim(), "solve_estimate");
  return ldlt_.solve(b);
}

double spd_det(const SpdMatrix& m) { return m.det(); }

double inv_norm(const SpdMatrix& m, const Vector& x) { return m.inv_norm(x); }

Vector solve_estimate(const SpdMatrix& m, const Vector& b) { return m.solve(b); }

double psd_det(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw DimensionError("psd_det: matrix must be square");
  }
  return m.determinant();
}

double min_eigenvalue(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw DimensionError("min_eigenvalue: matrix must be square and nonempty");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalDomainError("min_eigenvalue: eigensolver did not converge");
  }
  return solver.eigenvalues()[0];
}

void require_dim(const Vector& x, Eigen::Index dim, const char* what) {
  if (x.size() != dim) {
    std::ostringstream os;
    os << what << ": dimension mismatch (expected " << dim << ", got " << x.size() << ")";
    throw DimensionError(os.str());
  }
}

}  // namespace fedlinucb
