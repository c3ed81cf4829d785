#include "confopt/plugin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "confopt/confusion.hpp"
#include "confopt/error.hpp"

namespace confopt {

namespace {

constexpr double kNoValue = -std::numeric_limits<double>::infinity();

// counts[i][j] over m rows, divided out the same way on every path so equal partitions give
// bitwise-equal confusions.
ConfusionMatrix conf_from_counts(const std::size_t (&counts)[2][2], std::size_t m) {
  ConfusionMatrix c(2);
  const double dm = static_cast<double>(m);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) c(i, j) = static_cast<double>(counts[i][j]) / dm;
  }
  return c;
}

double try_evaluate(const Metric& metric, const ConfusionMatrix& c) {
  try {
    return evaluate(metric, c);
  } catch (const Error&) {
    return kNoValue;  // e.g. AMS with no false positives
  }
}

void check_binary_rows(std::span<const double> eta2, std::span<const int> labels) {
  if (eta2.size() != labels.size()) throw Error("need one score per label");
  if (eta2.empty()) throw Error("empty sample");
  for (int y : labels) {
    if (y != 0 && y != 1) throw Error("invalid label for a binary problem");
  }
}

}  // namespace

ScorerPtr resolve_scorer(const ScorerSource& source, const LabeledSample& train) {
  if (source.fixed) {
    if (source.fixed->num_classes() != train.n() || source.fixed->dim() != train.d()) {
      throw Error("fixed scorer does not match the sample dimensions");
    }
    return source.fixed;
  }
  return std::make_shared<const CpeModel>(train_cpe(train, source.cpe).model);
}

ClassifierRule weighted_argmax_classifier(const GainMatrix& gain, ScorerPtr scorer) {
  return ClassifierRule::weighted_argmax(gain, std::move(scorer));
}

double threshold_metric(std::span<const double> eta2, std::span<const int> labels, const Metric& metric,
                        double t) {
  check_binary_rows(eta2, labels);
  std::size_t counts[2][2] = {};
  for (std::size_t k = 0; k < eta2.size(); ++k) ++counts[labels[k]][eta2[k] > t ? 1 : 0];
  return try_evaluate(metric, conf_from_counts(counts, eta2.size()));
}

std::pair<double, double> best_threshold(std::span<const double> eta2, std::span<const int> labels,
                                         const Metric& metric) {
  check_binary_rows(eta2, labels);
  const std::size_t m = eta2.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return eta2[a] < eta2[b]; });

  // Start at t = 0: rows with eta_2 > 0 predict class 2.
  std::size_t counts[2][2] = {};
  std::size_t pos = 0;  // rows order[0..pos) predict class 1
  for (std::size_t k = 0; k < m; ++k) ++counts[labels[k]][eta2[k] > 0.0 ? 1 : 0];
  while (pos < m && !(eta2[order[pos]] > 0.0)) ++pos;

  double best_t = 0.0;
  double best_v = try_evaluate(metric, conf_from_counts(counts, m));
  auto consider = [&](double t) {
    const double v = try_evaluate(metric, conf_from_counts(counts, m));
    if (v > best_v) {
      best_v = v;
      best_t = t;
    }
  };
  while (pos < m) {
    const double v = eta2[order[pos]];
    if (v >= 1.0) break;
    // Move every row at this value to class 1, then test the midpoint to the next value.
    while (pos < m && eta2[order[pos]] == v) {
      const int y = labels[order[pos]];
      --counts[y][1];
      ++counts[y][0];
      ++pos;
    }
    if (pos < m) consider(0.5 * (v + eta2[order[pos]]));
  }
  // t = 1: everything predicts class 1.
  std::size_t all_one[2][2] = {};
  for (std::size_t k = 0; k < m; ++k) ++all_one[labels[k]][eta2[k] > 1.0 ? 1 : 0];
  const double v1 = try_evaluate(metric, conf_from_counts(all_one, m));
  if (v1 > best_v) {
    best_v = v1;
    best_t = 1.0;
  }
  if (best_v == kNoValue) throw Error("metric is undefined at every candidate threshold");
  return {best_t, best_v};
}

ThresholdPlugin binary_threshold_plugin(const LabeledSample& sample, const Metric& metric,
                                        const SplitConfig& split, const ScorerSource& source) {
  if (sample.n() != 2) throw Error("binary-plugin requires n=2, got n=" + std::to_string(sample.n()));
  const auto parts = split_sample(sample, split);
  auto scorer = resolve_scorer(source, parts.train);
  std::vector<double> eta2(parts.tune.size());
  for (std::size_t k = 0; k < parts.tune.size(); ++k) eta2[k] = scorer->predict(parts.tune.x(k))[1];
  const auto [t, v] = best_threshold(eta2, parts.tune.labels(), metric);
  return {ClassifierRule::threshold(t, std::move(scorer)), t, v};
}

std::vector<GainMatrix> gain_candidates(int n, bool monotone, const GainGridConfig& grid) {
  if (grid.per_entry_levels < 2) throw Error("gain grid needs at least 2 levels per entry");
  if (grid.max_candidates < 1) throw Error("gain grid needs at least one candidate");
  std::vector<double> levels(static_cast<std::size_t>(grid.per_entry_levels));
  for (int i = 0; i < grid.per_entry_levels; ++i) {
    levels[static_cast<std::size_t>(i)] = -1.0 + 2.0 * i / (grid.per_entry_levels - 1);
  }
  std::vector<double> diag_levels;
  for (double v : levels) {
    if (!monotone || v >= 0.0) diag_levels.push_back(v);
  }

  std::vector<GainMatrix> out{GainMatrix::identity(n)};
  const std::size_t cap = grid.max_candidates;
  // Grid size, stopping early once it exceeds the cap.
  double size = 1.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) size *= static_cast<double>(i == j ? diag_levels.size() : levels.size());
  }
  if (size + 1.0 <= static_cast<double>(cap)) {
    const std::size_t cells = static_cast<std::size_t>(n * n);
    std::vector<std::size_t> idx(cells, 0);
    const auto identity = GainMatrix::identity(n);
    while (true) {
      GainMatrix g(n);
      for (std::size_t e = 0; e < cells; ++e) {
        const bool diag = e / static_cast<std::size_t>(n) == e % static_cast<std::size_t>(n);
        g.entries()[e] = diag ? diag_levels[idx[e]] : levels[idx[e]];
      }
      if (!(g == identity)) out.push_back(std::move(g));
      std::size_t e = 0;
      for (; e < cells; ++e) {
        const bool diag = e / static_cast<std::size_t>(n) == e % static_cast<std::size_t>(n);
        const std::size_t lim = diag ? diag_levels.size() : levels.size();
        if (++idx[e] < lim) break;
        idx[e] = 0;
      }
      if (e == cells) break;
    }
    return out;
  }
  std::mt19937_64 rng(grid.seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  while (out.size() < cap) {
    GainMatrix g(n);
    for (double& v : g.entries()) v = u(rng);
    out.push_back(std::move(g));
  }
  return out;
}

BruteForcePlugin brute_force_plugin(const LabeledSample& sample, const Metric& metric,
                                    const SplitConfig& split, const GainGridConfig& grid,
                                    const ScorerSource& source) {
  if (is_binary_only(metric.id) && sample.n() != 2) throw Error("metric requires n=2");
  const auto parts = split_sample(sample, split);
  auto scorer = resolve_scorer(source, parts.train);
  const auto points = score_sample(parts.tune, scorer);
  const auto cands = gain_candidates(sample.n(), is_monotone(metric.id), grid);
  std::size_t best = 0;
  double best_v = kNoValue;
  for (std::size_t c = 0; c < cands.size(); ++c) {
    const double v = try_evaluate(metric, linear_step_conf(cands[c], points));
    if (v > best_v) {
      best_v = v;
      best = c;
    }
  }
  if (best_v == kNoValue) throw Error("metric is undefined for every candidate gain matrix");
  return {ClassifierRule::weighted_argmax(cands[best], std::move(scorer)), cands[best], best_v,
          cands.size()};
}

}  // namespace confopt
