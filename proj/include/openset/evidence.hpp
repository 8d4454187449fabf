#ifndef OPENSET_EVIDENCE_HPP_
#define OPENSET_EVIDENCE_HPP_

#include <cstddef>
#include <optional>
#include <vector>

#include "openset/data.hpp"
#include "openset/inference.hpp"

namespace openset {

// Log evidence as a function of r at a = 0, B = 0:
//
//   (N/2) [K log r - sum_k log(r + T_k)]
//     - (T/2) log |S - sum_k f_k f_k' / (r + T_k)|
//
// The prior is improper in this limit, so the value is only meaningful
// relative to other values of r on the same data.
// Throws DegenerateScatter if the inner matrix is not positive definite.
double log_evidence_noninformative(const SufficientStats& stats, double r);

// Full log marginal likelihood log P(X | L, r, a, B) for a proper prior
// (a > N - 1, B positive definite), with every normalizing constant.
// Throws ImproperPrior otherwise.
double log_evidence_proper(const SufficientStats& stats, const PriorHyper& prior);

struct TuneResult {
  double r = 0.0;
  double log_evidence = 0.0;
  bool at_boundary = false;  // r equals r_min or r_max
  std::size_t evaluations = 0;
};

// Maximizes log_evidence_noninformative over [r_min, r_max] by golden-section
// search on log r, stopping once the bracket is narrower than tol (in log r).
// A coarse log-spaced scan picks the starting bracket; the endpoints are
// always candidates, so the result is never worse than either of them.
TuneResult tune_r(const SufficientStats& stats, double r_min, double r_max,
                  double tol = 1e-6);

struct EvidenceCurve {
  std::vector<double> r_values;
  std::vector<std::optional<double>> log_evidence;  // empty where degenerate
  std::optional<std::size_t> mode;                  // index of the maximum

  std::optional<double> mode_r() const {
    if (!mode) return std::nullopt;
    return r_values[*mode];
  }
};

EvidenceCurve evidence_curve(const SufficientStats& stats, std::vector<double> r_grid);

// n points log-spaced from r_min to r_max inclusive.
std::vector<double> log_spaced_grid(double r_min, double r_max, std::size_t n);

}  // namespace openset

#endif  // OPENSET_EVIDENCE_HPP_
