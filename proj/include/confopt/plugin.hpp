#pragma once

#include <cstdint>

#include "confopt/cpe.hpp"
#include "confopt/metrics.hpp"
#include "confopt/rule.hpp"
#include "confopt/sample.hpp"

namespace confopt {

/// Where a learner's class-probability estimate comes from: a CPE model trained on S', or
/// a fixed scorer (exact eta of a synthetic distribution), in which case S' is unused.
struct ScorerSource {
  CpeTrainConfig cpe;
  ScorerPtr fixed;
};

/// Returns the scorer for a split: `fixed` when set, otherwise a CPE model fitted to `train`.
ScorerPtr resolve_scorer(const ScorerSource& source, const LabeledSample& train);

ClassifierRule weighted_argmax_classifier(const GainMatrix& gain, ScorerPtr scorer);

struct ThresholdPlugin {
  ClassifierRule rule;
  double threshold = 0.0;
  double tune_value = 0.0;  // metric on S''
};

/// Candidate thresholds on S'': 0, 1 and the midpoints between consecutive distinct eta_2
/// values. Ties in metric value go to the smaller threshold.
ThresholdPlugin binary_threshold_plugin(const LabeledSample& sample, const Metric& metric,
                                        const SplitConfig& split, const ScorerSource& source = {});

/// The threshold search on its own: tuning rows and their eta_2 estimates.
std::pair<double, double> best_threshold(std::span<const double> eta2, std::span<const int> labels,
                                         const Metric& metric);

/// Metric of the rule "class 2 iff eta_2 > t" on the given rows.
double threshold_metric(std::span<const double> eta2, std::span<const int> labels,
                        const Metric& metric, double t);

struct GainGridConfig {
  int per_entry_levels = 5;  // uniform points in [-1, 1] per entry
  std::size_t max_candidates = 20000;
  std::uint64_t seed = 0;
};

/// Candidate gain matrices. Structured grid (diagonal restricted to [0, 1] for monotone
/// metrics) when it fits in max_candidates, else seeded uniform draws from [-1, 1]^{n x n}.
/// The identity is always first.
std::vector<GainMatrix> gain_candidates(int n, bool monotone, const GainGridConfig& grid);

struct BruteForcePlugin {
  ClassifierRule rule;
  GainMatrix gain;
  double tune_value = 0.0;
  std::size_t candidates = 0;
};

BruteForcePlugin brute_force_plugin(const LabeledSample& sample, const Metric& metric,
                                    const SplitConfig& split, const GainGridConfig& grid,
                                    const ScorerSource& source = {});

}  // namespace confopt
