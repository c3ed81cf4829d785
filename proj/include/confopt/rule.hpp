#pragma once

#include <span>
#include <variant>
#include <vector>

#include "confopt/matrix.hpp"
#include "confopt/scorer.hpp"

namespace confopt {

class ClassifierRule;

/// Predicts argmax_y g_y^T eta(x) (g_y = column y of the gain), ties to the larger index.
struct WeightedArgmaxRule {
  GainMatrix gain;
  ScorerPtr scorer;
};

/// Binary rule: class 2 (index 1) when eta_2(x) > threshold, class 1 otherwise.
struct ThresholdRule {
  double threshold = 0.5;
  ScorerPtr scorer;
};

struct ConstantRule {
  ClassDistribution dist;
};

/// Convex combination of non-mixture rules.
struct MixtureRule {
  std::vector<double> weights;
  std::vector<ClassifierRule> components;
};

/// A (possibly randomized) classifier x -> h(x) in the simplex.
class ClassifierRule {
 public:
  using Variant = std::variant<WeightedArgmaxRule, ThresholdRule, ConstantRule, MixtureRule>;

  static ClassifierRule weighted_argmax(GainMatrix gain, ScorerPtr scorer);
  static ClassifierRule threshold(double t, ScorerPtr scorer);
  static ClassifierRule constant(ClassDistribution dist);
  static ClassifierRule uniform(int n);

  /// Weights must be nonnegative and sum to 1 within 1e-9. Nested mixtures are flattened,
  /// so the result never contains a mixture component.
  static ClassifierRule mixture(std::vector<double> weights, std::vector<ClassifierRule> components);

  int num_classes() const { return n_; }
  const Variant& variant() const { return v_; }
  bool is_mixture() const { return std::holds_alternative<MixtureRule>(v_); }

  /// h(x). Scorer outputs are computed once per distinct scorer, so a large mixture over a
  /// shared CPE model costs one model evaluation per call.
  ClassDistribution predict(std::span<const double> x) const;
  void predict_into(std::span<const double> x, std::span<double> out) const;

 private:
  ClassifierRule(Variant v, int n) : v_(std::move(v)), n_(n) {}

  Variant v_;
  int n_ = 0;
};

/// Single-step prediction of a weighted-argmax rule given the scorer output.
int weighted_argmax_predict(const GainMatrix& gain, std::span<const double> eta);

}  // namespace confopt
