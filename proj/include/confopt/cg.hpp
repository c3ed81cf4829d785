#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "confopt/confusion.hpp"
#include "confopt/distribution.hpp"
#include "confopt/metrics.hpp"
#include "confopt/plugin.hpp"
#include "confopt/rule.hpp"

namespace confopt {

struct CgConfig {
  int iterations = 0;  // T; when 0, T = min(kappa * m, t_cap)
  int kappa = 1;
  int t_cap = 5000;
  std::optional<ClassifierRule> initial_rule;  // uniform constant rule when unset
  double alpha = 0.5;
  std::uint64_t seed = 0;
  bool record_trace = true;

  int resolve_iterations(std::size_t m) const;
};

struct CgTraceRecord {
  int iter = 0;
  double objective = 0.0;  // psi_rho at conf(h^{iter-1}), where the gradient is taken
  double grad_linf = 0.0;
  GainMatrix gradient;
};

struct CgResult {
  ClassifierRule ensemble;  // flattened mixture [h^0, u^1, ..., u^T]
  std::vector<CgTraceRecord> trace;
  ConfusionMatrix final_conf;  // conf(h^T) on the points the loop measured
  double final_objective = 0.0;
  int iterations = 0;
};

/// Step size gamma_j = 2 / (j + 1).
inline double cg_step(int j) { return 2.0 / (j + 1.0); }

/// Weight of u^j in h^T after unrolling the recursion: 2j / (T (T + 1)).
inline double cg_component_weight(int j, int T) {
  return 2.0 * j / (static_cast<double>(T) * (T + 1.0));
}

/// Deterministic rule assigning each support point to argmax_y g_y^T eta_k (ties to the larger
/// index). Maximises <G, exact_conf(h, dist)> over all randomized h.
ClassifierRule exact_linear_max(const GainMatrix& gain, const FiniteDistribution& dist);

/// Conditional gradient on the exact feasible set of `dist`.
CgResult idealized_cg(const FiniteDistribution& dist, const SmoothedMetric& sm, const CgConfig& config);

/// The sample-based loop: gradients at confusions measured on `points`, linear steps are
/// weighted-argmax rules over the cached scores.
CgResult conditional_gradient(const ScoredPoints& points, const SmoothedMetric& sm, int iterations,
                              const CgConfig& config);

/// BayesCG: split, fit (or take) the scorer, then run conditional_gradient on S''.
CgResult bayescg(const LabeledSample& sample, const SmoothedMetric& sm, const CgConfig& config,
                 const ScorerSource& source = {});

/// 2 eps + 8 beta / (T + 2).
double cg_regret_bound(double beta, int T, double epsilon);

struct NonsmoothBoundInputs {
  SmoothingConstants constants;
  double cpe_l1 = 0.0;
  int n = 2;
  double m = 1.0;
  double alpha = 0.5;
  double delta = 0.05;
  double T = 1.0;
  double distribution_free_c = 1.0;
};

/// 4 L E||eta_hat - eta||_1 + 4 beta n^2 C sqrt((n^2 log n log(alpha m) + log(n^2/delta)) / (alpha m))
///   + 8 beta / (T + 2) + 2 theta.
double nonsmooth_regret_bound(const NonsmoothBoundInputs& in);

}  // namespace confopt
