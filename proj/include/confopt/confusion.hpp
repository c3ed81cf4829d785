#pragma once

#include <span>
#include <utility>
#include <vector>

#include "confopt/distribution.hpp"
#include "confopt/matrix.hpp"
#include "confopt/rule.hpp"
#include "confopt/sample.hpp"

namespace confopt {

/// Entry (i, j) = (1/m) sum_k h_j(x_k) 1(y_k = i).
ConfusionMatrix empirical_conf(const ClassifierRule& rule, const LabeledSample& sample);

/// Entry (i, j) = sum_k q_k eta_k[i] h_j(x_k).
ConfusionMatrix exact_conf(const ClassifierRule& rule, const FiniteDistribution& dist);

/// Entrywise convex combination; weights must sum to one within 1e-9.
ConfusionMatrix mix_conf(std::span<const std::pair<double, ConfusionMatrix>> parts);

/// Alias of ClassifierRule::predict, named after the ensemble operation.
inline ClassDistribution ensemble_predict(const ClassifierRule& rule, std::span<const double> x) {
  return rule.predict(x);
}

/// Points at which a confusion matrix is measured, with one scorer's outputs cached.
/// conf(h)_{ij} = sum_k label_mass[k][i] * h_j(x_k). For a sample the label mass of row k is
/// e_{y_k}/m; for a finite distribution it is q_k eta_k.
struct ScoredPoints {
  int n = 0;
  int d = 0;
  std::vector<double> features;    // K x d
  std::vector<double> scores;      // K x n, scorer output at each point
  std::vector<double> label_mass;  // K x n
  ScorerPtr scorer;

  std::size_t size() const { return n == 0 ? 0 : scores.size() / static_cast<std::size_t>(n); }
  std::span<const double> x(std::size_t k) const {
    return {features.data() + k * static_cast<std::size_t>(d), static_cast<std::size_t>(d)};
  }
  std::span<const double> score(std::size_t k) const {
    return {scores.data() + k * static_cast<std::size_t>(n), static_cast<std::size_t>(n)};
  }
  std::span<const double> mass(std::size_t k) const {
    return {label_mass.data() + k * static_cast<std::size_t>(n), static_cast<std::size_t>(n)};
  }
};

ScoredPoints score_sample(const LabeledSample& sample, ScorerPtr scorer);
ScoredPoints score_distribution(const FiniteDistribution& dist, ScorerPtr scorer);

/// Label mass taken from a known eta at each sampled x (mass eta(x_k)/m) instead of the
/// drawn labels. Used for low-variance held-out estimates on continuous distributions.
ScoredPoints score_points_with_eta(const std::vector<double>& features, int d, const Scorer& eta,
                                   ScorerPtr scorer);

/// Confusion of `rule` over the points. Weighted-argmax components whose scorer is the cached
/// one reuse the stored scores.
ConfusionMatrix conf_on_points(const ClassifierRule& rule, const ScoredPoints& points);

/// Confusion of the deterministic rule argmax_y g_y^T score(x) over the points.
ConfusionMatrix linear_step_conf(const GainMatrix& gain, const ScoredPoints& points);

}  // namespace confopt
