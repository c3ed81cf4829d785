#include "confopt/cg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "confopt/error.hpp"

namespace confopt {

namespace {

void check_gradient(const GainMatrix& g, int iter) {
  if (!g.all_finite()) throw Error("non-finite gradient at iteration " + std::to_string(iter));
}

void blend(ConfusionMatrix& conf, const ConfusionMatrix& step_conf, double gamma) {
  auto a = conf.entries();
  const auto b = step_conf.entries();
  for (std::size_t k = 0; k < a.size(); ++k) a[k] = (1.0 - gamma) * a[k] + gamma * b[k];
}

ClassifierRule assemble(ClassifierRule initial, std::vector<ClassifierRule> steps) {
  const int T = static_cast<int>(steps.size());
  std::vector<double> weights{0.0};
  std::vector<ClassifierRule> comps{std::move(initial)};
  for (int j = 1; j <= T; ++j) {
    weights.push_back(cg_component_weight(j, T));
    comps.push_back(std::move(steps[static_cast<std::size_t>(j - 1)]));
  }
  return ClassifierRule::mixture(std::move(weights), std::move(comps));
}

// Shared body of both loops: `linear_step` maps a gradient to (rule, its confusion).
template <class LinearStep>
CgResult run_cg(ClassifierRule initial, ConfusionMatrix conf, const SmoothedMetric& sm, int T,
                bool record_trace, LinearStep&& linear_step) {
  if (T < 1) throw Error("iteration count must be at least 1");
  std::vector<ClassifierRule> steps;
  steps.reserve(static_cast<std::size_t>(T));
  std::vector<CgTraceRecord> trace;
  for (int j = 1; j <= T; ++j) {
    GainMatrix g;
    try {
      g = grad_smoothed(sm, conf);
    } catch (const Error& e) {
      throw Error("iteration " + std::to_string(j) + ": " + e.what());
    }
    check_gradient(g, j);
    if (record_trace) trace.push_back({j, eval_smoothed(sm, conf), g.max_abs(), g});
    auto [rule, step_conf] = linear_step(g);
    blend(conf, step_conf, cg_step(j));
    steps.push_back(std::move(rule));
  }
  const double objective = eval_smoothed(sm, conf);
  return {assemble(std::move(initial), std::move(steps)), std::move(trace), std::move(conf), objective, T};
}

}  // namespace

int CgConfig::resolve_iterations(std::size_t m) const {
  if (iterations < 0) throw Error("iteration count must be positive");
  if (iterations > 0) return iterations;
  if (kappa < 1) throw Error("kappa must be at least 1");
  if (t_cap < 1) throw Error("iteration cap must be at least 1");
  const double t = std::min(static_cast<double>(kappa) * static_cast<double>(m), static_cast<double>(t_cap));
  return std::max(1, static_cast<int>(t));
}

ClassifierRule exact_linear_max(const GainMatrix& gain, const FiniteDistribution& dist) {
  return ClassifierRule::weighted_argmax(gain, std::make_shared<const FiniteEtaOracle>(dist));
}

CgResult idealized_cg(const FiniteDistribution& dist, const SmoothedMetric& sm, const CgConfig& config) {
  const int T = config.resolve_iterations(dist.size());
  auto initial = config.initial_rule.value_or(ClassifierRule::uniform(dist.n()));
  if (initial.num_classes() != dist.n()) throw Error("initial rule has the wrong class count");
  auto conf = exact_conf(initial, dist);
  const ScorerPtr eta = std::make_shared<const FiniteEtaOracle>(dist);
  return run_cg(std::move(initial), std::move(conf), sm, T, config.record_trace, [&](const GainMatrix& g) {
    auto u = ClassifierRule::weighted_argmax(g, eta);
    auto c = exact_conf(u, dist);
    return std::pair{std::move(u), std::move(c)};
  });
}

CgResult conditional_gradient(const ScoredPoints& points, const SmoothedMetric& sm, int iterations,
                              const CgConfig& config) {
  if (points.size() == 0) throw Error("empty sample");
  auto initial = config.initial_rule.value_or(ClassifierRule::uniform(points.n));
  if (initial.num_classes() != points.n) throw Error("initial rule has the wrong class count");
  auto conf = conf_on_points(initial, points);
  return run_cg(std::move(initial), std::move(conf), sm, iterations, config.record_trace,
                [&](const GainMatrix& g) {
                  return std::pair{ClassifierRule::weighted_argmax(g, points.scorer), linear_step_conf(g, points)};
                });
}

CgResult bayescg(const LabeledSample& sample, const SmoothedMetric& sm, const CgConfig& config,
                 const ScorerSource& source) {
  if (!(sm.rho > 0.0)) throw Error("BayesCG needs rho > 0");
  const int T = config.resolve_iterations(sample.size());
  const auto parts = split_sample(sample, SplitConfig{config.alpha, config.seed});
  auto scorer = resolve_scorer(source, parts.train);
  const auto points = score_sample(parts.tune, std::move(scorer));
  return conditional_gradient(points, sm, T, config);
}

double cg_regret_bound(double beta, int T, double epsilon) {
  if (!(beta > 0.0)) throw Error("beta must be positive");
  if (T < 1) throw Error("T must be at least 1");
  if (!(epsilon >= 0.0)) throw Error("epsilon must be nonnegative");
  return 2.0 * epsilon + 8.0 * beta / (T + 2.0);
}

double nonsmooth_regret_bound(const NonsmoothBoundInputs& in) {
  const auto& k = in.constants;
  if (!(k.theta >= 0.0 && k.lipschitz >= 0.0 && k.smoothness >= 0.0)) {
    throw Error("smoothing constants must be nonnegative");
  }
  if (!(in.delta > 0.0 && in.delta <= 1.0)) throw Error("delta must lie in (0, 1]");
  if (!(in.alpha > 0.0 && in.alpha < 1.0)) throw Error("alpha must lie in (0, 1)");
  if (in.n < 2) throw Error("n must be at least 2");
  if (!(in.alpha * in.m >= 1.0)) throw Error("alpha * m must be at least 1");
  if (!(in.T >= 1.0)) throw Error("T must be at least 1");
  if (!(in.cpe_l1 >= 0.0 && in.distribution_free_c >= 0.0)) {
    throw Error("calibration error and C must be nonnegative");
  }
  const double n = in.n;
  const double am = in.alpha * in.m;
  const double uniform =
      std::sqrt((n * n * std::log(n) * std::log(am) + std::log(n * n / in.delta)) / am);
  return 4.0 * k.lipschitz * in.cpe_l1 + 4.0 * k.smoothness * n * n * in.distribution_free_c * uniform +
         8.0 * k.smoothness / (in.T + 2.0) + 2.0 * k.theta;
}

}  // namespace confopt
