#include "openset/matkernel.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "openset/errors.hpp"

namespace openset {

SymMatrix::SymMatrix(const Matrix& a) {
  if (a.rows() != a.cols()) {
    throw ShapeMismatch("SymMatrix: matrix is " + std::to_string(a.rows()) +
                        "x" + std::to_string(a.cols()) + ", expected square");
  }
  if (a.rows() == 0) {
    throw EmptyDimension("SymMatrix: dimension must be >= 1");
  }
  m_ = (a + a.transpose()) * 0.5;
}

SymMatrix SymMatrix::zero(std::size_t n) {
  const auto k = static_cast<Eigen::Index>(n);
  return SymMatrix(Matrix::Zero(k, k));
}

SymMatrix SymMatrix::identity(std::size_t n) {
  const auto k = static_cast<Eigen::Index>(n);
  return SymMatrix(Matrix::Identity(k, k));
}

SymMatrix SymMatrix::scaled_identity(std::size_t n, double s) {
  const auto k = static_cast<Eigen::Index>(n);
  return SymMatrix(Matrix::Identity(k, k) * s);
}

CholeskyFactor cholesky(const SymMatrix& a) {
  const Matrix& m = a.matrix();
  const Eigen::Index n = m.rows();
  const double max_diag = m.diagonal().maxCoeff();
  if (!(max_diag > 0.0)) {
    throw NotPositiveDefinite("cholesky: largest diagonal entry is not positive");
  }
  const double threshold = kPivotTolerance * max_diag;

  // Plain left-looking factorization so every pivot can be tested against
  // the scale-relative threshold before its square root is taken.
  Matrix lower = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double pivot = m(j, j);
    for (Eigen::Index p = 0; p < j; ++p) pivot -= lower(j, p) * lower(j, p);
    if (!(pivot > threshold)) {
      throw NotPositiveDefinite("cholesky: pivot " + std::to_string(j) +
                                " is " + std::to_string(pivot) +
                                ", below tolerance " + std::to_string(threshold));
    }
    const double ljj = std::sqrt(pivot);
    lower(j, j) = ljj;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double s = m(i, j);
      for (Eigen::Index p = 0; p < j; ++p) s -= lower(i, p) * lower(j, p);
      lower(i, j) = s / ljj;
    }
  }
  return CholeskyFactor(std::move(lower));
}

double logdet(const CholeskyFactor& chol) {
  return 2.0 * chol.lower().diagonal().array().log().sum();
}

namespace {

void check_length(const CholeskyFactor& chol, const Vector& v, const char* op) {
  if (static_cast<std::size_t>(v.size()) != chol.dim()) {
    throw DimensionMismatch(std::string(op) + ": vector has length " +
                            std::to_string(v.size()) + ", factor has dimension " +
                            std::to_string(chol.dim()));
  }
}

}  // namespace

Vector solve(const CholeskyFactor& chol, const Vector& b) {
  check_length(chol, b, "solve");
  const auto lower = chol.lower().triangularView<Eigen::Lower>();
  Vector y = lower.solve(b);
  return lower.transpose().solve(y);
}

Matrix inverse(const CholeskyFactor& chol) {
  const auto n = static_cast<Eigen::Index>(chol.dim());
  const auto lower = chol.lower().triangularView<Eigen::Lower>();
  Matrix y = lower.solve(Matrix::Identity(n, n));
  return lower.transpose().solve(y);
}

double quadform(const CholeskyFactor& chol, const Vector& d) {
  check_length(chol, d, "quadform");
  Vector y = chol.lower().triangularView<Eigen::Lower>().solve(d);
  return y.squaredNorm();
}

bool is_positive_semidefinite(const SymMatrix& a) {
  Eigen::LDLT<Matrix> ldlt(a.matrix());
  if (ldlt.info() != Eigen::Success) return false;
  const double scale = a.matrix().diagonal().cwiseAbs().maxCoeff();
  const Vector d = ldlt.vectorD();
  return (d.array() >= -1e-12 * scale).all();
}

double log_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError("log_gamma: argument must be positive and finite, got " +
                      std::to_string(x));
  }
  return std::lgamma(x);
}

double log_multivariate_gamma(std::size_t n, double x) {
  if (n == 0) throw DomainError("log_multivariate_gamma: dimension must be >= 1");
  const double nd = static_cast<double>(n);
  const double smallest = x + (1.0 - nd) / 2.0;
  if (!(smallest > 0.0)) {
    throw DomainError("log_multivariate_gamma: x + (1-N)/2 = " +
                      std::to_string(smallest) + " must be positive");
  }
  double sum = nd * (nd - 1.0) / 4.0 * std::log(std::numbers::pi);
  for (std::size_t i = 1; i <= n; ++i) {
    sum += log_gamma(x + (1.0 - static_cast<double>(i)) / 2.0);
  }
  return sum;
}

}  // namespace openset
