#include "openset/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "openset/errors.hpp"

namespace openset {

double SeededGenerator::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double SeededGenerator::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  cached_normal_ = v * factor;
  has_cached_normal_ = true;
  return u * factor;
}

double SeededGenerator::gamma(double shape) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw DomainError("gamma: shape must be positive, got " + std::to_string(shape));
  }
  if (shape < 1.0) {
    const double g = gamma(shape + 1.0);
    double u;
    do {
      u = uniform();
    } while (u == 0.0);
    return g * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    double z, v;
    do {
      z = normal();
      v = 1.0 + c * z;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * z * z * z * z) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * z * z + d * (1.0 - v + std::log(v))) return d * v;
  }
}

Vector SeededGenerator::normal_vector(std::size_t n) {
  Vector z(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal();
  return z;
}

WishartDraw sample_wishart_factor(SeededGenerator& gen, double a,
                                  const CholeskyFactor& b_chol) {
  const Eigen::Index n = static_cast<Eigen::Index>(b_chol.dim());
  if (!(a > static_cast<double>(n) - 1.0)) {
    throw DomainError("sample_wishart: need a > N - 1, got a = " + std::to_string(a));
  }
  Matrix bartlett = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    bartlett(i, i) = std::sqrt(gen.chi_square(a - static_cast<double>(i)));
    for (Eigen::Index j = 0; j < i; ++j) bartlett(i, j) = gen.normal();
  }
  // With C C' = B^{-1} lower, C A is lower with positive diagonal, so it is
  // already the Cholesky factor of Lambda = C A A' C'.
  const CholeskyFactor inv = cholesky(SymMatrix(inverse(b_chol)));
  const Matrix lower = inv.lower().triangularView<Eigen::Lower>() * bartlett;
  const double log_det = 2.0 * lower.diagonal().array().log().sum();
  return WishartDraw{lower, log_det};
}

SymMatrix sample_wishart(SeededGenerator& gen, double a, const SymMatrix& b) {
  CholeskyFactor bc = [&] {
    try {
      return cholesky(b);
    } catch (const NotPositiveDefinite& e) {
      throw DomainError(std::string("sample_wishart: B must be positive definite: ") +
                        e.what());
    }
  }();
  const WishartDraw w = sample_wishart_factor(gen, a, bc);
  return SymMatrix(w.lower * w.lower.transpose());
}

Matrix sample_matrix_normal(SeededGenerator& gen, const Matrix& location,
                            const Vector& r_diag, const CholeskyFactor& lambda_chol) {
  const Eigen::Index n = location.rows();
  const Eigen::Index k = location.cols();
  if (static_cast<std::size_t>(n) != lambda_chol.dim() || r_diag.size() != k) {
    throw ShapeMismatch("sample_matrix_normal: location is " + std::to_string(n) + "x" +
                        std::to_string(k) + ", precision factor has dimension " +
                        std::to_string(lambda_chol.dim()) + ", r_diag has length " +
                        std::to_string(r_diag.size()));
  }
  if (!(r_diag.array() > 0.0).all()) {
    throw DomainError("sample_matrix_normal: r_diag must be positive");
  }
  const auto upper = lambda_chol.lower().transpose().triangularView<Eigen::Upper>();
  Matrix out(n, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const Vector z = gen.normal_vector(static_cast<std::size_t>(n));
    out.col(j) = location.col(j) + upper.solve(z) / std::sqrt(r_diag(j));
  }
  return out;
}

McEstimate jackknife_mean_exp(const std::vector<double>& log_values) {
  const std::size_t n = log_values.size();
  if (n == 0) throw DomainError("jackknife_mean_exp: no samples");
  const double shift = *std::max_element(log_values.begin(), log_values.end());
  std::vector<double> w(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = std::exp(log_values[i] - shift);
    sum += w[i];
  }
  const double nd = static_cast<double>(n);
  const double mean = sum / nd;
  double se = 0.0;
  if (n > 1) {
    // Leave-one-out means and the jackknife variance around their average.
    double loo_sum = 0.0;
    for (double wi : w) loo_sum += (sum - wi) / (nd - 1.0);
    const double loo_mean = loo_sum / nd;
    double ss = 0.0;
    for (double wi : w) {
      const double dev = (sum - wi) / (nd - 1.0) - loo_mean;
      ss += dev * dev;
    }
    se = std::sqrt((nd - 1.0) / nd * ss);
  }
  const double scale = std::exp(shift);
  return McEstimate{mean * scale, se * scale, shift + std::log(mean), n};
}

McEstimate mc_predictive(SeededGenerator& gen, const PosteriorMNW& post, const Vector& x,
                         std::size_t k, std::size_t n_samples) {
  if (n_samples == 0) throw DomainError("mc_predictive: need at least one sample");
  if (static_cast<std::size_t>(x.size()) != post.dim()) {
    throw DimensionMismatch("mc_predictive: pattern length does not match posterior");
  }
  const ColumnMarginal marginal = column_marginal(post, k);
  const CholeskyFactor b_chol = [&] {
    try {
      return cholesky(post.b_star);
    } catch (const NotPositiveDefinite& e) {
      throw DomainError(std::string("mc_predictive: B* must be positive definite: ") +
                        e.what());
    }
  }();
  const auto n = static_cast<Eigen::Index>(post.dim());
  const double log_two_pi = std::log(2.0 * std::numbers::pi);
  const double sd = std::sqrt(marginal.c);

  std::vector<double> log_values(n_samples);
  for (std::size_t s = 0; s < n_samples; ++s) {
    const WishartDraw w = sample_wishart_factor(gen, post.a_star, b_chol);
    // mu = mu*_k + sqrt(c) L^{-T} z has covariance c Lambda^{-1}.
    const auto upper = w.lower.transpose().triangularView<Eigen::Upper>();
    const Vector mu = marginal.mean + sd * upper.solve(gen.normal_vector(post.dim()));
    const double q = (w.lower.transpose() * (x - mu)).squaredNorm();
    log_values[s] = 0.5 * w.log_det - 0.5 * static_cast<double>(n) * log_two_pi - 0.5 * q;
  }
  return jackknife_mean_exp(log_values);
}

}  // namespace openset
