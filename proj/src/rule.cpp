#include "confopt/rule.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "confopt/error.hpp"

namespace confopt {

namespace {

void check_scorer(const ScorerPtr& scorer, int n) {
  if (!scorer) throw Error("rule needs a scorer");
  if (scorer->num_classes() != n) {
    throw Error("scorer predicts " + std::to_string(scorer->num_classes()) +
                " classes, rule expects " + std::to_string(n));
  }
}

// Scorer outputs for one input, keyed by scorer identity.
class ScoreMemo {
 public:
  explicit ScoreMemo(std::span<const double> x) : x_(x) {}

  std::span<const double> get(const Scorer* s) {
    for (auto& [key, buf] : entries_) {
      if (key == s) return buf;
    }
    entries_.emplace_back(s, ClassDistribution(static_cast<std::size_t>(s->num_classes())));
    s->predict_into(x_, entries_.back().second);
    return entries_.back().second;
  }

 private:
  std::span<const double> x_;
  std::vector<std::pair<const Scorer*, ClassDistribution>> entries_;
};

void predict_simple(const ClassifierRule::Variant& v, ScoreMemo& memo, std::span<double> out,
                    double weight) {
  if (const auto* r = std::get_if<WeightedArgmaxRule>(&v)) {
    out[static_cast<std::size_t>(weighted_argmax_predict(r->gain, memo.get(r->scorer.get())))] += weight;
  } else if (const auto* r = std::get_if<ThresholdRule>(&v)) {
    out[memo.get(r->scorer.get())[1] > r->threshold ? 1 : 0] += weight;
  } else if (const auto* r = std::get_if<ConstantRule>(&v)) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += weight * r->dist[i];
  }
}

}  // namespace

int weighted_argmax_predict(const GainMatrix& gain, std::span<const double> eta) {
  const int n = gain.n();
  int best = 0;
  double best_val = 0.0;
  for (int y = 0; y < n; ++y) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += gain(i, y) * eta[static_cast<std::size_t>(i)];
    if (y == 0 || s >= best_val) {
      best = y;
      best_val = s;
    }
  }
  return best;
}

ClassifierRule ClassifierRule::weighted_argmax(GainMatrix gain, ScorerPtr scorer) {
  const int n = gain.n();
  check_scorer(scorer, n);
  if (!gain.all_finite()) throw Error("gain matrix has non-finite entries");
  return ClassifierRule(WeightedArgmaxRule{std::move(gain), std::move(scorer)}, n);
}

ClassifierRule ClassifierRule::threshold(double t, ScorerPtr scorer) {
  check_scorer(scorer, 2);
  if (!std::isfinite(t)) throw Error("threshold must be finite");
  return ClassifierRule(ThresholdRule{t, std::move(scorer)}, 2);
}

ClassifierRule ClassifierRule::constant(ClassDistribution dist) {
  check_simplex(dist, "constant rule output");
  const int n = static_cast<int>(dist.size());
  if (n > kMaxClasses) throw Error("too many classes");
  return ClassifierRule(ConstantRule{std::move(dist)}, n);
}

ClassifierRule ClassifierRule::uniform(int n) {
  if (n < 1 || n > kMaxClasses) throw Error("class count must be in [1, 64]");
  return constant(ClassDistribution(static_cast<std::size_t>(n), 1.0 / n));
}

ClassifierRule ClassifierRule::mixture(std::vector<double> weights,
                                       std::vector<ClassifierRule> components) {
  if (weights.size() != components.size()) throw Error("mixture needs one weight per component");
  if (components.empty()) throw Error("mixture has no components");
  check_simplex(weights, "mixture weights");
  const int n = components.front().num_classes();
  MixtureRule flat;
  for (std::size_t c = 0; c < components.size(); ++c) {
    if (components[c].num_classes() != n) throw Error("mixture components disagree on class count");
    if (const auto* inner = std::get_if<MixtureRule>(&components[c].v_)) {
      for (std::size_t k = 0; k < inner->components.size(); ++k) {
        flat.weights.push_back(weights[c] * inner->weights[k]);
        flat.components.push_back(inner->components[k]);
      }
    } else {
      flat.weights.push_back(weights[c]);
      flat.components.push_back(std::move(components[c]));
    }
  }
  return ClassifierRule(std::move(flat), n);
}

ClassDistribution ClassifierRule::predict(std::span<const double> x) const {
  ClassDistribution out(static_cast<std::size_t>(n_));
  predict_into(x, out);
  return out;
}

void ClassifierRule::predict_into(std::span<const double> x, std::span<double> out) const {
  if (out.size() != static_cast<std::size_t>(n_)) throw Error("output buffer has wrong size");
  std::fill(out.begin(), out.end(), 0.0);
  ScoreMemo memo(x);
  if (const auto* mix = std::get_if<MixtureRule>(&v_)) {
    for (std::size_t c = 0; c < mix->components.size(); ++c) {
      if (mix->weights[c] == 0.0) continue;
      predict_simple(mix->components[c].v_, memo, out, mix->weights[c]);
    }
  } else {
    predict_simple(v_, memo, out, 1.0);
  }
}

}  // namespace confopt
