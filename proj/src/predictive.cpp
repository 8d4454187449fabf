#include "openset/predictive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "openset/errors.hpp"

namespace openset {

ModelParams to_params(const PosteriorMNW& post, std::vector<std::string> class_names) {
  const std::size_t k = post.num_classes();
  if (class_names.empty()) {
    for (std::size_t i = 0; i < k; ++i) class_names.push_back("class" + std::to_string(i + 1));
  }
  if (class_names.size() != k) {
    throw ShapeMismatch("to_params: " + std::to_string(class_names.size()) +
                        " class names for " + std::to_string(k) + " classes");
  }
  ModelParams p;
  p.dim = post.dim();
  p.class_names = std::move(class_names);
  p.r = post.source_r;
  p.a_star = post.a_star;
  p.b_star = post.b_star;
  for (std::size_t i = 0; i < k; ++i) {
    const ColumnMarginal cm = column_marginal(post, i);
    p.mu_star.push_back(cm.mean);
    p.c_star.push_back(cm.c);
  }
  return p;
}

PosteriorMNW to_posterior(const ModelParams& params) {
  const auto n = static_cast<Eigen::Index>(params.dim);
  const auto k = static_cast<Eigen::Index>(params.c_star.size());
  PosteriorMNW post;
  post.m_star.resize(n, k);
  post.r_star_diag.resize(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    post.m_star.col(j) = params.mu_star[static_cast<std::size_t>(j)];
    post.r_star_diag(j) = 1.0 / params.c_star[static_cast<std::size_t>(j)];
  }
  post.a_star = params.a_star;
  post.b_star = params.b_star;
  post.source_r = params.r;
  return post;
}

ClassPrior::ClassPrior(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw ShapeMismatch("class prior: no classes");
  double sum = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw DomainError("class prior: entries must be finite and non-negative");
    }
    sum += p;
  }
  if (sum == 0.0) throw AllZeroPrior("class prior: all entries are zero");
  if (std::abs(sum - 1.0) > 1e-12) {
    throw DomainError("class prior: entries sum to " + std::to_string(sum) +
                      ", expected 1");
  }
}

ClassPrior ClassPrior::uniform(std::size_t k) {
  if (k == 0) throw ShapeMismatch("class prior: no classes");
  return ClassPrior(std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

CostMatrix::CostMatrix(Matrix costs) : costs_(std::move(costs)) {
  if (costs_.rows() == 0 || costs_.cols() == 0) {
    throw ShapeMismatch("cost matrix: empty");
  }
  if (!costs_.allFinite()) throw DomainError("cost matrix: entries must be finite");
}

CostMatrix CostMatrix::zero_one(std::size_t k) {
  const auto n = static_cast<Eigen::Index>(k);
  return CostMatrix(Matrix::Ones(n, n) - Matrix::Identity(n, n));
}

namespace {

CholeskyFactor factor_b_star(const ModelParams& p) {
  try {
    return cholesky(p.b_star);
  } catch (const NotPositiveDefinite& e) {
    throw DegenerateScatter(
        std::string("B* is not positive definite (at the non-informative prior this "
                    "needs more training patterns than dimensions): ") +
        e.what());
  }
}

void validate_params(const ModelParams& p) {
  if (p.dim == 0) throw EmptyDimension("model: dimension is zero");
  const std::size_t k = p.c_star.size();
  if (k == 0) throw ShapeMismatch("model: no classes");
  if (p.mu_star.size() != k || p.class_names.size() != k) {
    throw ShapeMismatch("model: mu_star, c_star and class_names disagree in length");
  }
  if (p.b_star.dim() != p.dim) throw ShapeMismatch("model: B* has the wrong dimension");
  for (std::size_t i = 0; i < k; ++i) {
    if (static_cast<std::size_t>(p.mu_star[i].size()) != p.dim) {
      throw ShapeMismatch("model: mu_star[" + std::to_string(i) + "] has wrong length");
    }
    if (!(p.c_star[i] > 0.0) || !std::isfinite(p.c_star[i])) {
      throw DomainError("model: c_star[" + std::to_string(i) + "] must be positive");
    }
  }
}

}  // namespace

PredictiveModel::PredictiveModel(ModelParams params)
    : params_((validate_params(params), std::move(params))),
      chol_(factor_b_star(params_)),
      logdet_b_star_(logdet(chol_)) {
  // checked after B* so a rank-deficient fit reports the scatter first
  const double n = static_cast<double>(params_.dim);
  const double a = params_.a_star;
  if (!(a + 1.0 - n > 0.0)) {
    throw InsufficientDof("model: a* + 1 - N = " + std::to_string(a + 1.0 - n) +
                          " must be positive");
  }
  const double gamma_ratio = log_gamma((a + 1.0) / 2.0) - log_gamma((a + 1.0 - n) / 2.0);
  log_norm_.reserve(params_.c_star.size());
  for (double c : params_.c_star) {
    log_norm_.push_back(gamma_ratio - 0.5 * n * std::log(std::numbers::pi * (c + 1.0)) -
                        0.5 * logdet_b_star_);
  }
}

double PredictiveModel::log_norm(std::size_t k) const {
  if (k >= log_norm_.size()) throw IndexOutOfRange("log_norm: class out of range");
  return log_norm_[k];
}

void PredictiveModel::check(const Vector& x, std::size_t k) const {
  if (static_cast<std::size_t>(x.size()) != params_.dim) {
    throw DimensionMismatch("score: pattern has length " + std::to_string(x.size()) +
                            ", model dimension is " + std::to_string(params_.dim));
  }
  if (k >= num_classes()) {
    throw IndexOutOfRange("score: class " + std::to_string(k) + " out of range");
  }
}

// -((a*+1)/2) log(1 + beta q), beta = 1/(c*_k + 1).
double PredictiveModel::log_kernel(const Vector& x, std::size_t k) const {
  const double beta = 1.0 / (params_.c_star[k] + 1.0);
  const double u = beta * quadform(chol_, x - params_.mu_star[k]);
  const double log_term = u < 0.5 ? std::log1p(u) : std::log(1.0 + u);
  return -0.5 * (params_.a_star + 1.0) * log_term;
}

double PredictiveModel::log_predictive(const Vector& x, std::size_t k) const {
  check(x, k);
  return log_norm_[k] + log_kernel(x, k);
}

double PredictiveModel::log_predictive_unnormalized(const Vector& x, std::size_t k) const {
  check(x, k);
  const double n = static_cast<double>(params_.dim);
  return -0.5 * n * std::log(params_.c_star[k] + 1.0) + log_kernel(x, k);
}

std::vector<double> PredictiveModel::class_posterior(const Vector& x,
                                                     const ClassPrior& prior) const {
  if (prior.size() != num_classes()) {
    throw ShapeMismatch("class_posterior: prior has " + std::to_string(prior.size()) +
                        " entries, model has " + std::to_string(num_classes()) +
                        " classes");
  }
  std::vector<double> scores(num_classes());
  for (std::size_t k = 0; k < scores.size(); ++k) {
    scores[k] = log_predictive_unnormalized(x, k);
  }
  return posterior_from_scores(scores, prior);
}

PredictiveModel build_model(const PosteriorMNW& post, std::vector<std::string> class_names) {
  return PredictiveModel(to_params(post, std::move(class_names)));
}

std::vector<double> posterior_from_scores(const std::vector<double>& log_scores,
                                          const ClassPrior& prior) {
  if (log_scores.size() != prior.size()) {
    throw ShapeMismatch("posterior_from_scores: length mismatch");
  }
  const std::size_t k = log_scores.size();
  std::vector<double> logits(k, -std::numeric_limits<double>::infinity());
  double max_logit = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < k; ++i) {
    if (prior.probs()[i] > 0.0) {
      logits[i] = std::log(prior.probs()[i]) + log_scores[i];
      max_logit = std::max(max_logit, logits[i]);
    }
  }
  if (!std::isfinite(max_logit)) {
    throw AllZeroPrior("posterior_from_scores: no class has positive prior and finite score");
  }
  std::vector<double> post(k, 0.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    if (prior.probs()[i] > 0.0) {
      post[i] = std::exp(logits[i] - max_logit);
      sum += post[i];
    }
  }
  for (double& p : post) p /= sum;
  return post;
}

std::size_t decide(const std::vector<double>& posterior, const CostMatrix& costs) {
  if (posterior.size() != costs.num_classes()) {
    throw ShapeMismatch("decide: posterior has " + std::to_string(posterior.size()) +
                        " entries, cost matrix has " +
                        std::to_string(costs.num_classes()) + " rows");
  }
  std::size_t best = 0;
  double best_cost = std::numeric_limits<double>::infinity();
  for (std::size_t alpha = 0; alpha < costs.num_actions(); ++alpha) {
    double expected = 0.0;
    for (std::size_t k = 0; k < posterior.size(); ++k) {
      expected += posterior[k] * costs.costs()(static_cast<Eigen::Index>(k),
                                               static_cast<Eigen::Index>(alpha));
    }
    if (expected < best_cost) {
      best_cost = expected;
      best = alpha;
    }
  }
  return best;
}

std::vector<ScoredRow> score_batch(const PredictiveModel& model,
                                   const std::vector<Vector>& rows,
                                   const ClassPrior& prior, const CostMatrix& costs) {
  std::vector<ScoredRow> out;
  out.reserve(rows.size());
  for (const Vector& x : rows) {
    ScoredRow row;
    row.log_scores.resize(model.num_classes());
    for (std::size_t k = 0; k < model.num_classes(); ++k) {
      row.log_scores[k] = model.log_predictive_unnormalized(x, k);
    }
    row.posterior = posterior_from_scores(row.log_scores, prior);
    row.action = decide(row.posterior, costs);
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace openset
