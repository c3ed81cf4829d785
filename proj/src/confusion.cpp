#include "confopt/confusion.hpp"

#include <cmath>
#include <map>
#include <string>

#include "confopt/error.hpp"

namespace confopt {

ConfusionMatrix empirical_conf(const ClassifierRule& rule, const LabeledSample& sample) {
  if (sample.empty()) throw Error("empirical confusion of an empty sample");
  if (rule.num_classes() != sample.n()) throw Error("rule and sample disagree on class count");
  const int n = sample.n();
  ConfusionMatrix c(n);
  ClassDistribution h(static_cast<std::size_t>(n));
  const double w = 1.0 / static_cast<double>(sample.size());
  for (std::size_t k = 0; k < sample.size(); ++k) {
    rule.predict_into(sample.x(k), h);
    const int y = sample.y(k);
    for (int j = 0; j < n; ++j) c(y, j) += w * h[static_cast<std::size_t>(j)];
  }
  return c;
}

ConfusionMatrix exact_conf(const ClassifierRule& rule, const FiniteDistribution& dist) {
  if (rule.num_classes() != dist.n()) throw Error("rule and distribution disagree on class count");
  const int n = dist.n();
  ConfusionMatrix c(n);
  ClassDistribution h(static_cast<std::size_t>(n));
  for (const auto& p : dist.points()) {
    rule.predict_into(p.x, h);
    for (int i = 0; i < n; ++i) {
      const double mi = p.mass * p.eta[static_cast<std::size_t>(i)];
      for (int j = 0; j < n; ++j) c(i, j) += mi * h[static_cast<std::size_t>(j)];
    }
  }
  return c;
}

ConfusionMatrix mix_conf(std::span<const std::pair<double, ConfusionMatrix>> parts) {
  if (parts.empty()) throw Error("mixing zero confusion matrices");
  std::vector<double> w;
  w.reserve(parts.size());
  for (const auto& p : parts) w.push_back(p.first);
  check_simplex(w, "confusion mixing weights");
  const int n = parts.front().second.n();
  ConfusionMatrix out(n);
  for (const auto& [wt, c] : parts) {
    if (c.n() != n) throw Error("mixing confusion matrices of different size");
    for (std::size_t k = 0; k < out.entries().size(); ++k) out.entries()[k] += wt * c.entries()[k];
  }
  return out;
}

namespace {

ScoredPoints make_points(int n, int d, ScorerPtr scorer) {
  if (!scorer) throw Error("scored points need a scorer");
  if (scorer->num_classes() != n) throw Error("scorer class count does not match the data");
  if (scorer->dim() != d) throw Error("scorer feature dimension does not match the data");
  ScoredPoints pts;
  pts.n = n;
  pts.d = d;
  pts.scorer = std::move(scorer);
  return pts;
}

void append_score(ScoredPoints& pts, std::span<const double> x) {
  const std::size_t off = pts.scores.size();
  pts.scores.resize(off + static_cast<std::size_t>(pts.n));
  pts.scorer->predict_into(x, std::span<double>(pts.scores).subspan(off, static_cast<std::size_t>(pts.n)));
}

}  // namespace

ScoredPoints score_sample(const LabeledSample& sample, ScorerPtr scorer) {
  if (sample.empty()) throw Error("scoring an empty sample");
  auto pts = make_points(sample.n(), sample.d(), std::move(scorer));
  pts.features = sample.features();
  pts.label_mass.assign(sample.size() * static_cast<std::size_t>(sample.n()), 0.0);
  const double w = 1.0 / static_cast<double>(sample.size());
  for (std::size_t k = 0; k < sample.size(); ++k) {
    append_score(pts, sample.x(k));
    pts.label_mass[k * static_cast<std::size_t>(sample.n()) + static_cast<std::size_t>(sample.y(k))] = w;
  }
  return pts;
}

ScoredPoints score_distribution(const FiniteDistribution& dist, ScorerPtr scorer) {
  auto pts = make_points(dist.n(), dist.d(), std::move(scorer));
  for (const auto& p : dist.points()) {
    pts.features.insert(pts.features.end(), p.x.begin(), p.x.end());
    append_score(pts, p.x);
    for (double e : p.eta) pts.label_mass.push_back(p.mass * e);
  }
  return pts;
}

ScoredPoints score_points_with_eta(const std::vector<double>& features, int d, const Scorer& eta,
                                   ScorerPtr scorer) {
  if (d <= 0 || features.empty() || features.size() % static_cast<std::size_t>(d) != 0) {
    throw Error("feature buffer is empty or not a multiple of the dimension");
  }
  auto pts = make_points(eta.num_classes(), d, std::move(scorer));
  if (eta.dim() != d) throw Error("eta feature dimension does not match the data");
  const std::size_t m = features.size() / static_cast<std::size_t>(d);
  pts.features = features;
  pts.label_mass.resize(m * static_cast<std::size_t>(pts.n));
  const double w = 1.0 / static_cast<double>(m);
  for (std::size_t k = 0; k < m; ++k) {
    const auto x = pts.x(k);
    append_score(pts, x);
    auto mass = std::span<double>(pts.label_mass).subspan(k * static_cast<std::size_t>(pts.n),
                                                          static_cast<std::size_t>(pts.n));
    eta.predict_into(x, mass);
    for (double& v : mass) v *= w;
  }
  return pts;
}

ConfusionMatrix linear_step_conf(const GainMatrix& gain, const ScoredPoints& points) {
  if (gain.n() != points.n) throw Error("gain and points disagree on class count");
  const int n = points.n;
  ConfusionMatrix c(n);
  for (std::size_t k = 0; k < points.size(); ++k) {
    const int j = weighted_argmax_predict(gain, points.score(k));
    const auto mass = points.mass(k);
    for (int i = 0; i < n; ++i) c(i, j) += mass[static_cast<std::size_t>(i)];
  }
  return c;
}

namespace {

ConfusionMatrix conf_generic(const ClassifierRule& rule, const ScoredPoints& points) {
  const int n = points.n;
  ConfusionMatrix c(n);
  ClassDistribution h(static_cast<std::size_t>(n));
  for (std::size_t k = 0; k < points.size(); ++k) {
    rule.predict_into(points.x(k), h);
    const auto mass = points.mass(k);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) c(i, j) += mass[static_cast<std::size_t>(i)] * h[static_cast<std::size_t>(j)];
    }
  }
  return c;
}

ConfusionMatrix conf_simple(const ClassifierRule& rule, const ScoredPoints& points) {
  if (const auto* r = std::get_if<WeightedArgmaxRule>(&rule.variant())) {
    if (r->scorer == points.scorer) return linear_step_conf(r->gain, points);
  }
  return conf_generic(rule, points);
}

}  // namespace

ConfusionMatrix conf_on_points(const ClassifierRule& rule, const ScoredPoints& points) {
  if (rule.num_classes() != points.n) throw Error("rule and points disagree on class count");
  const auto* mix = std::get_if<MixtureRule>(&rule.variant());
  if (!mix) return conf_simple(rule, points);

  // Components over the cached scorer are grouped by gain so repeated vertices cost one pass.
  std::map<std::vector<double>, double> cached;
  std::vector<std::pair<double, const ClassifierRule*>> rest;
  for (std::size_t c = 0; c < mix->components.size(); ++c) {
    const double w = mix->weights[c];
    if (w == 0.0) continue;
    const auto* r = std::get_if<WeightedArgmaxRule>(&mix->components[c].variant());
    if (r && r->scorer == points.scorer) {
      const auto e = r->gain.entries();
      cached[std::vector<double>(e.begin(), e.end())] += w;
    } else {
      rest.emplace_back(w, &mix->components[c]);
    }
  }
  const int n = points.n;
  ConfusionMatrix out(n);
  auto acc = [&](double w, const ConfusionMatrix& c) {
    for (std::size_t k = 0; k < out.entries().size(); ++k) out.entries()[k] += w * c.entries()[k];
  };
  for (const auto& [g, w] : cached) acc(w, linear_step_conf(GainMatrix(n, g), points));
  if (!rest.empty()) {
    std::vector<double> ws;
    std::vector<ClassifierRule> comps;
    double total = 0.0;
    for (const auto& [w, r] : rest) total += w;
    for (const auto& [w, r] : rest) {
      ws.push_back(w / total);
      comps.push_back(*r);
    }
    acc(total, conf_generic(ClassifierRule::mixture(std::move(ws), std::move(comps)), points));
  }
  return out;
}

}  // namespace confopt
