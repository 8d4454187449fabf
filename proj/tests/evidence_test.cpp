#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "openset/errors.hpp"
#include "openset/evidence.hpp"
#include "openset/predictive.hpp"
#include "openset/synth.hpp"
#include "openset/verify.hpp"
#include "test_util.hpp"

using namespace openset;
using namespace openset::testing;

namespace {

// Dense log-spaced grid search; independent of the golden-section path.
struct GridMax {
  double r;
  double log_spacing;
};

GridMax grid_argmax(const SufficientStats& s, double r_min, double r_max, std::size_t n) {
  const double lo = std::log(r_min);
  const double step = (std::log(r_max) - lo) / static_cast<double>(n - 1);
  double best_r = r_min;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double r = std::exp(lo + step * static_cast<double>(i));
    const double v = log_evidence_noninformative(s, r);
    if (v > best) {
      best = v;
      best_r = r;
    }
  }
  return {best_r, step};
}

}  // namespace

TEST_CASE("non-informative evidence examples") {
  for (double r : {1e-3, 1.0, 50.0}) {
    CHECK(log_evidence_noninformative(SufficientStats::zero(3, 4), r) == 0.0);
  }
  const SufficientStats s = accumulate(worked_dataset());
  const double expected = 0.5 * (2.0 * std::log(1.0) - std::log(3.0) - std::log(2.0)) -
                          1.5 * std::log(20.0 / 3.0);
  CHECK(std::abs(log_evidence_noninformative(s, 1.0) - expected) < 1e-14);

  double prev = log_evidence_noninformative(s, 1e-2);
  for (double r : {1e-4, 1e-6, 1e-8, 1e-10}) {
    const double v = log_evidence_noninformative(s, r);
    CHECK(v < prev);
    prev = v;
  }
  CHECK(prev < -20.0);

  CHECK_THROWS_AS(log_evidence_noninformative(s, 0.0), DomainError);
}

TEST_CASE("non-informative evidence: empty declared classes contribute nothing") {
  LabeledDataset ds = worked_dataset();
  const double base = log_evidence_noninformative(accumulate(ds), 0.7);
  ds.declare_class("open");
  CHECK(log_evidence_noninformative(accumulate(ds), 0.7) == base);
}

TEST_CASE("non-informative evidence is degenerate with too few patterns") {
  LabeledDataset ds;
  ds.dim = 3;
  ds.class_names = {"a", "b"};
  // T < N: the scatter has rank at most 2 in three dimensions
  ds.patterns = {vec({1, 2, 3}), vec({0, 1, -1})};
  ds.labels = {0, 1};
  CHECK_THROWS_AS(log_evidence_noninformative(accumulate(ds), 1.0), DegenerateScatter);
}

TEST_CASE("proper evidence: no data, one point and improper priors") {
  const PriorHyper prior(2.0, 3.0, SymMatrix(mat2(1.5, 0.2, 0.2, 0.8)));
  CHECK(log_evidence_proper(SufficientStats::zero(2, 2), prior) == 0.0);

  LabeledDataset one;
  one.dim = 1;
  one.class_names = {"a", "b"};
  one.patterns = {vec({0.8})};
  one.labels = {1};
  const PriorHyper p1(0.5, 1.5, SymMatrix::scaled_identity(1, 2.0));
  const PredictiveModel prior_predictive =
      build_model(posterior(SufficientStats::zero(1, 2), p1));
  CHECK(std::abs(log_evidence_proper(accumulate(one), p1) -
                 prior_predictive.log_predictive(vec({0.8}), 1)) < 1e-12);

  CHECK_THROWS_AS(log_evidence_proper(accumulate(one), PriorHyper::noninformative(1.0)), ImproperPrior);
  CHECK_THROWS_AS(log_evidence_proper(accumulate(one), PriorHyper(1.0, 0.0, SymMatrix::identity(1))),
                  ImproperPrior);
}

TEST_CASE("property: chain-rule identity for proper priors") {
  std::mt19937_64 rng(51);
  SeededGenerator gen(52);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 1 + trial % 3;
    const LabeledDataset ds = random_dataset(rng, n, 1 + trial % 3, 8 + trial);
    const PriorHyper prior(0.3 + trial, static_cast<double>(n) - 0.5 + trial,
                           random_spd(rng, static_cast<Eigen::Index>(n), 0.5));
    const double closed = log_evidence_proper(accumulate(ds), prior);
    for (int perm = 0; perm < 5; ++perm) {
      const auto order = random_permutation(gen, ds.size());
      CHECK(std::abs(closed - chain_rule_log_evidence(ds, prior, order)) < 1e-8);
    }
  }
}

TEST_CASE("property: proper evidence differences approach the non-informative ones") {
  // As a -> 0 and B = eps I -> 0 the r-dependence of the proper evidence
  // tends to that of the non-informative formula. a -> 0 is only a proper
  // prior for N = 1 (a > N - 1), so the limit is exercised there.
  std::mt19937_64 rng(53);
  const LabeledDataset ds = random_dataset(rng, 1, 3, 15);
  const SufficientStats s = accumulate(ds);
  const PriorHyper p(1.0, 1e-6, SymMatrix::scaled_identity(1, 1e-6));
  for (double r2 : {0.1, 3.0, 40.0}) {
    const PriorHyper q(r2, 1e-6, SymMatrix::scaled_identity(1, 1e-6));
    const double proper = log_evidence_proper(s, p) - log_evidence_proper(s, q);
    const double noninf = log_evidence_noninformative(s, 1.0) - log_evidence_noninformative(s, r2);
    CHECK(std::abs(proper - noninf) < 1e-3);
  }
}

TEST_CASE("tune_r returns r_min on a decreasing curve") {
  // Two well separated clusters, each tight: a tiny r (no shrinkage) is best
  // across the whole range tested.
  LabeledDataset ds;
  ds.dim = 1;
  ds.class_names = {"a", "b"};
  for (double x : {100.0, 100.1, 99.9, -100.0, -100.1, -99.9}) {
    ds.patterns.push_back(vec({x}));
    ds.labels.push_back(x > 0 ? 0 : 1);
  }
  const SufficientStats s = accumulate(ds);
  const double r_min = 1e-3;
  const double r_max = 1e3;
  CHECK(log_evidence_noninformative(s, 10.0) < log_evidence_noninformative(s, 1.0));
  CHECK(log_evidence_noninformative(s, 1.0) < log_evidence_noninformative(s, r_min));
  const TuneResult t = tune_r(s, r_min, r_max, 1e-8);
  CHECK(t.r == r_min);
  CHECK(t.at_boundary);
}

TEST_CASE("tune_r matches a dense grid search on synthetic data") {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    SeededGenerator gen(seed);
    SynthSpec spec;
    spec.dim = 2;
    spec.counts.assign(20, 10);
    spec.r_true = 0.2 * static_cast<double>(seed);
    const SufficientStats s = accumulate(generate_synthetic(gen, spec).dataset);
    const TuneResult t = tune_r(s, 1e-4, 1e4, 1e-8);
    const GridMax g = grid_argmax(s, 1e-4, 1e4, 1000);
    CHECK(std::abs(std::log(t.r) - std::log(g.r)) < g.log_spacing);
    CHECK(t.log_evidence >= log_evidence_noninformative(s, 1e-4));
    CHECK(t.log_evidence >= log_evidence_noninformative(s, 1e4));
    CHECK(t.log_evidence >= log_evidence_noninformative(s, g.r) - 1e-9);
  }
}

TEST_CASE("tune_r on the worked 1-D stats matches the grid") {
  const SufficientStats s = accumulate(worked_dataset());
  const TuneResult t = tune_r(s, 1e-3, 1e3, 1e-9);
  const GridMax g = grid_argmax(s, 1e-3, 1e3, 1000);
  CHECK(std::abs(std::log(t.r) - std::log(g.r)) <= g.log_spacing);
  CHECK(t.log_evidence >= log_evidence_noninformative(s, 1e-3));
  CHECK(t.log_evidence >= log_evidence_noninformative(s, 1e3));
}

TEST_CASE("tune_r errors") {
  LabeledDataset ds;
  ds.dim = 2;
  ds.class_names = {"a"};
  ds.patterns = {vec({1, 2})};
  ds.labels = {0};
  CHECK_THROWS_AS(tune_r(accumulate(ds), 1e-2, 1e2), DegenerateScatter);
  CHECK_THROWS_AS(tune_r(accumulate(worked_dataset()), 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(tune_r(accumulate(worked_dataset()), -1.0, 1.0), DomainError);
}

TEST_CASE("evidence_curve") {
  const SufficientStats s = accumulate(worked_dataset());
  const EvidenceCurve single = evidence_curve(s, {2.0});
  REQUIRE(single.mode);
  CHECK(*single.mode == 0);

  const EvidenceCurve flat = evidence_curve(SufficientStats::zero(2, 3), log_spaced_grid(0.1, 10.0, 7));
  for (const auto& v : flat.log_evidence) CHECK(v == 0.0);

  SeededGenerator gen(9);
  SynthSpec spec;
  spec.dim = 2;
  spec.counts.assign(10, 8);
  spec.r_true = 0.5;
  const SufficientStats syn = accumulate(generate_synthetic(gen, spec).dataset);
  const auto grid = log_spaced_grid(1e-3, 1e3, 300);
  const EvidenceCurve curve = evidence_curve(syn, grid);
  const TuneResult t = tune_r(syn, 1e-3, 1e3, 1e-8);
  const double spacing = std::log(grid[1]) - std::log(grid[0]);
  CHECK(std::abs(std::log(*curve.mode_r()) - std::log(t.r)) <= spacing);

  CHECK_THROWS_AS(evidence_curve(s, {}), DomainError);
  CHECK_THROWS_AS(evidence_curve(s, {1.0, 1.0}), DomainError);
  CHECK_THROWS_AS(evidence_curve(s, {-1.0, 1.0}), DomainError);
}

TEST_CASE("evidence_curve records degenerate points as missing") {
  LabeledDataset ds;
  ds.dim = 2;
  ds.class_names = {"a"};
  ds.patterns = {vec({1, 2}), vec({2, 4})};
  ds.labels = {0, 0};
  const EvidenceCurve curve = evidence_curve(accumulate(ds), log_spaced_grid(0.1, 10.0, 5));
  for (const auto& v : curve.log_evidence) CHECK_FALSE(v.has_value());
  CHECK_FALSE(curve.mode.has_value());
}
