#ifndef OPENSET_MATKERNEL_HPP_
#define OPENSET_MATKERNEL_HPP_

#include <cstddef>

#include <Eigen/Dense>

namespace openset {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Relative pivot tolerance used by cholesky(): a pivot is rejected when it
// is <= kPivotTolerance * max_i A(i,i).
inline constexpr double kPivotTolerance = 1e-12;

// Dense N x N matrix that is exactly symmetric. Construction from an
// arbitrary square matrix replaces it by (A + A')/2, which is bitwise
// symmetric because floating-point addition commutes.
class SymMatrix {
 public:
  explicit SymMatrix(const Matrix& a);

  static SymMatrix zero(std::size_t n);
  static SymMatrix identity(std::size_t n);
  static SymMatrix scaled_identity(std::size_t n, double s);

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  double operator()(std::size_t i, std::size_t j) const {
    return m_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

  friend bool operator==(const SymMatrix& a, const SymMatrix& b) {
    return a.m_.rows() == b.m_.rows() && a.m_ == b.m_;
  }

 private:
  Matrix m_;
};

// Lower-triangular L with strictly positive diagonal and L L' = A.
class CholeskyFactor {
 public:
  std::size_t dim() const { return static_cast<std::size_t>(lower_.rows()); }
  const Matrix& lower() const { return lower_; }

 private:
  explicit CholeskyFactor(Matrix lower) : lower_(std::move(lower)) {}
  friend CholeskyFactor cholesky(const SymMatrix& a);

  Matrix lower_;
};

// Throws NotPositiveDefinite when a pivot falls below the relative tolerance.
CholeskyFactor cholesky(const SymMatrix& a);

// log |A| = 2 sum_i log L(i,i).
double logdet(const CholeskyFactor& chol);

// A^{-1} b by forward then backward substitution.
Vector solve(const CholeskyFactor& chol, const Vector& b);

// A^{-1}, column by column.
Matrix inverse(const CholeskyFactor& chol);

// d' A^{-1} d, evaluated as ||L^{-1} d||^2 so it is never negative.
double quadform(const CholeskyFactor& chol, const Vector& d);

// Positive semidefiniteness probe (pivoted LDL'), used to validate priors.
bool is_positive_semidefinite(const SymMatrix& a);

double log_gamma(double x);

// log Gamma_N(x) = N(N-1)/4 log(pi) + sum_{i=1..N} log Gamma(x + (1-i)/2).
double log_multivariate_gamma(std::size_t n, double x);

}  // namespace openset

#endif  // OPENSET_MATKERNEL_HPP_
