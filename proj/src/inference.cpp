#include "openset/inference.hpp"

#include <cmath>
#include <string>

#include "openset/errors.hpp"

namespace openset {

PriorHyper::PriorHyper(double r, double a, std::optional<SymMatrix> b)
    : r_(r), a_(a), b_(std::move(b)) {
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw DomainError("prior: r must be positive and finite, got " + std::to_string(r));
  }
  if (!(a >= 0.0) || !std::isfinite(a)) {
    throw DomainError("prior: a must be non-negative and finite, got " +
                      std::to_string(a));
  }
  if (b_) {
    if (!is_positive_semidefinite(*b_)) {
      throw DomainError("prior: B must be positive semidefinite");
    }
    const double n = static_cast<double>(b_->dim());
    if (a_ > n - 1.0) {
      try {
        cholesky(*b_);
        proper_ = true;
      } catch (const NotPositiveDefinite&) {
        proper_ = false;
      }
    }
  }
}

SymMatrix PriorHyper::b_or_zero(std::size_t n) const {
  if (!b_) return SymMatrix::zero(n);
  if (b_->dim() != n) {
    throw DimensionMismatch("prior: B has dimension " + std::to_string(b_->dim()) +
                            ", data has dimension " + std::to_string(n));
  }
  return *b_;
}

namespace detail {

GeneralPrior as_prior(const PosteriorMNW& post) {
  return GeneralPrior{post.m_star, post.r_star_diag, post.a_star, post.b_star};
}

PosteriorMNW update(const GeneralPrior& prior, const SufficientStats& stats,
                    double source_r) {
  const auto n = static_cast<Eigen::Index>(stats.dim());
  const auto k = static_cast<Eigen::Index>(stats.num_classes());
  if (prior.location.rows() != n || prior.location.cols() != k ||
      prior.precision_diag.size() != k || prior.b.dim() != stats.dim()) {
    throw ShapeMismatch("posterior update: prior and statistics disagree in shape");
  }

  Vector r_star(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    r_star(j) = prior.precision_diag(j) + static_cast<double>(stats.counts()[j]);
  }

  // G = F + Theta R;  M* = G R*^{-1};  B* = B + S + Theta R Theta' - G R*^{-1} G'.
  // With Theta = 0 this is B + S - F R*^{-1} F'.
  const Matrix g = stats.f() + prior.location * prior.precision_diag.asDiagonal();
  const Matrix m_star = g * r_star.cwiseInverse().asDiagonal();
  Matrix b_star = prior.b.matrix() + stats.scatter().matrix();
  if (!prior.location.isZero(0.0)) {
    b_star.noalias() +=
        prior.location * prior.precision_diag.asDiagonal() * prior.location.transpose();
  }
  b_star.noalias() -= g * r_star.cwiseInverse().asDiagonal() * g.transpose();

  PosteriorMNW post;
  post.m_star = m_star;
  post.r_star_diag = std::move(r_star);
  post.a_star = prior.a + static_cast<double>(stats.total());
  post.b_star = SymMatrix(b_star);
  post.source_r = source_r;
  return post;
}

}  // namespace detail

PosteriorMNW posterior(const SufficientStats& stats, const PriorHyper& prior) {
  const auto n = static_cast<Eigen::Index>(stats.dim());
  const auto k = static_cast<Eigen::Index>(stats.num_classes());
  detail::GeneralPrior general{Matrix::Zero(n, k), Vector::Constant(k, prior.r()),
                               prior.a(), prior.b_or_zero(stats.dim())};
  return detail::update(general, stats, prior.r());
}

PosteriorMNW add_empty_class(const PosteriorMNW& post) {
  PosteriorMNW out = post;
  const Eigen::Index k = post.m_star.cols();
  out.m_star.conservativeResize(Eigen::NoChange, k + 1);
  out.m_star.col(k).setZero();
  out.r_star_diag.conservativeResize(k + 1);
  out.r_star_diag(k) = post.source_r;
  return out;
}

ColumnMarginal column_marginal(const PosteriorMNW& post, std::size_t k) {
  if (k >= post.num_classes()) {
    throw IndexOutOfRange("column_marginal: class " + std::to_string(k) +
                          " out of range, K = " + std::to_string(post.num_classes()));
  }
  const auto j = static_cast<Eigen::Index>(k);
  return ColumnMarginal{post.m_star.col(j), 1.0 / post.r_star_diag(j)};
}

}  // namespace openset
