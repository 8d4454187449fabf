#include "openset/verify.hpp"

#include <cmath>
#include <numeric>

#include "openset/errors.hpp"
#include "openset/evidence.hpp"
#include "openset/synth.hpp"

namespace openset {

namespace {

CheckResult compare(std::string probe, double closed_form, double estimate,
                    double std_error, double tolerance) {
  CheckResult r;
  r.probe = std::move(probe);
  r.closed_form = closed_form;
  r.mc_estimate = estimate;
  r.std_error = std_error;
  r.tolerance = tolerance;
  r.pass = std::isfinite(closed_form) && std::isfinite(estimate) &&
           std::abs(closed_form - estimate) < tolerance;
  return r;
}

CheckResult failed(std::string probe, std::string note) {
  CheckResult r;
  r.probe = std::move(probe);
  r.note = std::move(note);
  r.pass = false;
  return r;
}

}  // namespace

std::vector<std::size_t> random_permutation(SeededGenerator& gen, std::size_t n) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(gen.uniform() * static_cast<double>(i));
    std::swap(p[i - 1], p[std::min(j, i - 1)]);
  }
  return p;
}

double chain_rule_log_evidence(const LabeledDataset& ds, const PriorHyper& prior,
                               const std::vector<std::size_t>& order) {
  SufficientStats seen = SufficientStats::zero(ds.dim, ds.num_classes());
  double total = 0.0;
  for (std::size_t idx : order) {
    const PredictiveModel model = build_model(posterior(seen, prior));
    total += model.log_predictive(ds.patterns[idx], ds.labels[idx]);
    LabeledDataset one;
    one.dim = ds.dim;
    one.class_names = ds.class_names;
    one.patterns = {ds.patterns[idx]};
    one.labels = {ds.labels[idx]};
    seen = merge(seen, accumulate(one));
  }
  return total;
}

std::vector<CheckResult> verify_wishart_mean(SeededGenerator& gen, double a,
                                             const SymMatrix& b, std::size_t samples) {
  const auto n = static_cast<Eigen::Index>(b.dim());
  Matrix sum = Matrix::Zero(n, n);
  Matrix sum_sq = Matrix::Zero(n, n);
  for (std::size_t s = 0; s < samples; ++s) {
    const SymMatrix w = sample_wishart(gen, a, b);
    sum += w.matrix();
    sum_sq += w.matrix().cwiseProduct(w.matrix());
  }
  const double ns = static_cast<double>(samples);
  const Matrix expected = a * inverse(cholesky(b));
  std::vector<CheckResult> out;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double mean = sum(i, j) / ns;
      const double var = std::max(0.0, sum_sq(i, j) / ns - mean * mean) * ns / (ns - 1.0);
      const double se = std::sqrt(var / ns);
      out.push_back(compare("wishart_mean[" + std::to_string(i) + "," + std::to_string(j) + "]",
                            expected(i, j), mean, se, 3.0 * se));
    }
  }
  return out;
}

std::vector<CheckResult> verify_mc_predictive(SeededGenerator& gen, std::size_t samples,
                                              std::size_t num_probes) {
  static constexpr std::size_t kDims[] = {1, 2, 3, 2, 3};
  static constexpr std::size_t kClasses[] = {1, 2, 3, 3, 2};
  std::vector<CheckResult> out;
  for (std::size_t p = 0; p < num_probes; ++p) {
    SynthSpec spec;
    spec.dim = kDims[p % 5];
    for (std::size_t c = 0; c < kClasses[p % 5]; ++c) {
      spec.counts.push_back(3 + static_cast<std::size_t>(gen.uniform() * 8.0));
    }
    const SynthData data = generate_synthetic(gen, spec);
    const double nd = static_cast<double>(spec.dim);
    const PriorHyper prior(1.0, nd + 2.0, SymMatrix::identity(spec.dim));
    const PosteriorMNW post = posterior(accumulate(data.dataset), prior);
    const PredictiveModel model = build_model(post);
    const std::size_t k = p % spec.counts.size();
    const Vector x = column_marginal(post, k).mean + 0.7 * gen.normal_vector(spec.dim);
    const double closed = std::exp(model.log_predictive(x, k));
    const McEstimate mc = mc_predictive(gen, post, x, k, samples);
    out.push_back(compare("mc_predictive[N=" + std::to_string(spec.dim) +
                              ",K=" + std::to_string(spec.counts.size()) +
                              ",k=" + std::to_string(k + 1) + "]",
                          closed, mc.estimate, mc.std_error, 3.0 * mc.std_error));
  }
  return out;
}

std::vector<CheckResult> verify_model(SeededGenerator& gen, const ModelParams& params,
                                      std::size_t samples, std::size_t max_probes) {
  std::vector<CheckResult> out;
  const std::size_t probes = std::min(max_probes, params.c_star.size());
  try {
    const PredictiveModel model(params);
    const PosteriorMNW post = to_posterior(params);
    // Probe scale: posterior-mean within-class standard deviations.
    const Vector scale = (params.b_star.matrix().diagonal() / params.a_star).cwiseSqrt();
    for (std::size_t k = 0; k < probes; ++k) {
      const std::string name = "model_predictive[" + params.class_names[k] + "]";
      const Vector x =
          params.mu_star[k] + scale.cwiseProduct(gen.normal_vector(params.dim));
      try {
        const double closed = std::exp(model.log_predictive(x, k));
        const McEstimate mc = mc_predictive(gen, post, x, k, samples);
        out.push_back(compare(name, closed, mc.estimate, mc.std_error, 3.0 * mc.std_error));
      } catch (const Error& e) {
        out.push_back(failed(name, e.what()));
      }
    }
  } catch (const Error& e) {
    out.push_back(failed("model_build", e.what()));
  }
  return out;
}

std::vector<CheckResult> verify_chain_rule(SeededGenerator& gen, std::size_t permutations) {
  SynthSpec spec;
  spec.dim = 2;
  spec.counts = {6, 6};
  const SynthData data = generate_synthetic(gen, spec);
  const PriorHyper prior(1.0, 4.0, SymMatrix::identity(2));
  const double closed = log_evidence_proper(accumulate(data.dataset), prior);
  std::vector<CheckResult> out;
  for (std::size_t p = 0; p < permutations; ++p) {
    const auto order = random_permutation(gen, data.dataset.size());
    out.push_back(compare("chain_rule[perm=" + std::to_string(p + 1) + "]", closed,
                          chain_rule_log_evidence(data.dataset, prior, order), 0.0, 1e-8));
  }
  return out;
}

}  // namespace openset
