#include "openset/evidence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "openset/errors.hpp"

namespace openset {

namespace {

// (N/2) [K log r - sum_k log(r + T_k)], summed per class so empty classes
// cancel exactly.
double shrinkage_term(const SufficientStats& stats, double r) {
  double sum = 0.0;
  for (std::size_t t : stats.counts()) {
    if (t == 0) continue;
    sum += std::log(r) - std::log(r + static_cast<double>(t));
  }
  return 0.5 * static_cast<double>(stats.dim()) * sum;
}

}  // namespace

double log_evidence_noninformative(const SufficientStats& stats, double r) {
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw DomainError("log_evidence: r must be positive and finite, got " +
                      std::to_string(r));
  }
  if (stats.total() == 0) return 0.0;

  Matrix inner = stats.scatter().matrix();
  for (std::size_t k = 0; k < stats.num_classes(); ++k) {
    const auto col = stats.f().col(static_cast<Eigen::Index>(k));
    inner.noalias() -= col * col.transpose() / (r + static_cast<double>(stats.counts()[k]));
  }
  double log_det = 0.0;
  try {
    log_det = logdet(cholesky(SymMatrix(inner)));
  } catch (const NotPositiveDefinite& e) {
    throw DegenerateScatter(std::string("log_evidence: scatter matrix at r = ") +
                            std::to_string(r) + " is not positive definite: " + e.what());
  }
  return shrinkage_term(stats, r) - 0.5 * static_cast<double>(stats.total()) * log_det;
}

double log_evidence_proper(const SufficientStats& stats, const PriorHyper& prior) {
  if (!prior.is_proper()) {
    throw ImproperPrior("log_evidence_proper: requires a > N - 1 and B positive definite");
  }
  const SymMatrix& b = *prior.b();
  if (b.dim() != stats.dim()) {
    throw DimensionMismatch("log_evidence_proper: prior and data dimensions differ");
  }
  if (stats.total() == 0) return 0.0;

  const PosteriorMNW post = posterior(stats, prior);
  double logdet_b_star = 0.0;
  try {
    logdet_b_star = logdet(cholesky(post.b_star));
  } catch (const NotPositiveDefinite& e) {
    throw DegenerateScatter(std::string("log_evidence_proper: B* ") + e.what());
  }
  const double n = static_cast<double>(stats.dim());
  const double t = static_cast<double>(stats.total());
  const double a = prior.a();
  const double a_star = post.a_star;
  // log|B/2| = log|B| - N log 2.
  const double logdet_half_b = logdet(cholesky(b)) - n * std::numbers::ln2;
  const double logdet_half_b_star = logdet_b_star - n * std::numbers::ln2;

  return -0.5 * t * n * std::log(2.0 * std::numbers::pi) +
         log_multivariate_gamma(stats.dim(), a_star / 2.0) -
         log_multivariate_gamma(stats.dim(), a / 2.0) + 0.5 * a * logdet_half_b -
         0.5 * a_star * logdet_half_b_star + shrinkage_term(stats, prior.r());
}

std::vector<double> log_spaced_grid(double r_min, double r_max, std::size_t n) {
  if (!(r_min > 0.0) || !(r_max > r_min)) {
    throw DomainError("log_spaced_grid: need 0 < r_min < r_max");
  }
  if (n == 0) throw DomainError("log_spaced_grid: need at least one point");
  if (n == 1) return {r_min};
  std::vector<double> grid(n);
  const double lo = std::log(r_min);
  const double step = (std::log(r_max) - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) grid[i] = std::exp(lo + step * static_cast<double>(i));
  grid.front() = r_min;
  grid.back() = r_max;
  return grid;
}

namespace {

// Objective on log r. Degenerate points evaluate to -inf; the first
// degeneracy message is kept so it can be re-raised if nothing is finite.
class LogEvidenceObjective {
 public:
  explicit LogEvidenceObjective(const SufficientStats& stats) : stats_(stats) {}

  double operator()(double log_r) {
    ++evaluations_;
    try {
      const double v = log_evidence_noninformative(stats_, std::exp(log_r));
      return std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
    } catch (const DegenerateScatter& e) {
      if (!degenerate_) degenerate_ = e.what();
      return -std::numeric_limits<double>::infinity();
    }
  }

  std::size_t evaluations() const { return evaluations_; }
  const std::optional<std::string>& degenerate() const { return degenerate_; }

 private:
  const SufficientStats& stats_;
  std::size_t evaluations_ = 0;
  std::optional<std::string> degenerate_;
};

constexpr std::size_t kCoarseScanPoints = 33;

}  // namespace

TuneResult tune_r(const SufficientStats& stats, double r_min, double r_max, double tol) {
  if (!(r_min > 0.0) || !(r_max > r_min) || !std::isfinite(r_max)) {
    throw DomainError("tune_r: need 0 < r_min < r_max");
  }
  if (!(tol > 0.0)) throw DomainError("tune_r: tol must be positive");

  LogEvidenceObjective f(stats);
  const double lo = std::log(r_min);
  const double hi = std::log(r_max);

  // Coarse scan to bracket the best region.
  std::vector<double> xs(kCoarseScanPoints);
  std::vector<double> fs(kCoarseScanPoints);
  const double step = (hi - lo) / static_cast<double>(kCoarseScanPoints - 1);
  for (std::size_t i = 0; i < kCoarseScanPoints; ++i) {
    xs[i] = i + 1 == kCoarseScanPoints ? hi : lo + step * static_cast<double>(i);
    fs[i] = f(xs[i]);
  }
  const auto best_it = std::max_element(fs.begin(), fs.end());
  if (!std::isfinite(*best_it)) {
    if (f.degenerate()) throw DegenerateScatter(*f.degenerate());
    throw NoFiniteValue("tune_r: log evidence is not finite anywhere in [r_min, r_max]");
  }
  const auto best = static_cast<std::size_t>(best_it - fs.begin());

  double best_x = xs[best];
  double best_f = fs[best];

  // Golden-section refinement inside the neighbouring cells.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = xs[best == 0 ? 0 : best - 1];
  double b = xs[std::min(best + 1, kCoarseScanPoints - 1)];
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double mid = 0.5 * (a + b);
  const double fmid = f(mid);
  for (auto [x, v] : {std::pair{c, fc}, std::pair{d, fd}, std::pair{mid, fmid}}) {
    if (v > best_f) {
      best_f = v;
      best_x = x;
    }
  }

  TuneResult result;
  result.log_evidence = best_f;
  result.evaluations = f.evaluations();
  if (best_x == lo) {
    result.r = r_min;
    result.at_boundary = true;
  } else if (best_x == hi) {
    result.r = r_max;
    result.at_boundary = true;
  } else {
    result.r = std::exp(best_x);
  }
  return result;
}

EvidenceCurve evidence_curve(const SufficientStats& stats, std::vector<double> r_grid) {
  if (r_grid.empty()) throw DomainError("evidence_curve: empty grid");
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    if (!(r_grid[i] > 0.0) || (i > 0 && !(r_grid[i] > r_grid[i - 1]))) {
      throw DomainError("evidence_curve: grid must be positive and strictly increasing");
    }
  }
  EvidenceCurve curve;
  curve.r_values = std::move(r_grid);
  curve.log_evidence.reserve(curve.r_values.size());
  for (std::size_t i = 0; i < curve.r_values.size(); ++i) {
    std::optional<double> v;
    try {
      const double e = log_evidence_noninformative(stats, curve.r_values[i]);
      if (std::isfinite(e)) v = e;
    } catch (const DegenerateScatter&) {
    }
    if (v && (!curve.mode || *v > *curve.log_evidence[*curve.mode])) curve.mode = i;
    curve.log_evidence.push_back(v);
  }
  return curve;
}

}  // namespace openset
