#include <cmath>
#include <random>

#include <array>

#include "confopt/confusion.hpp"
#include "confopt/error.hpp"
#include "confopt/plugin.hpp"
#include "confopt/synth.hpp"
#include "doctest.h"
#include "unit/test_support.hpp"

using namespace confopt;
using testing_support::dirichlet;
using testing_support::fn_scorer;

namespace {

const Metric kAccuracy{MetricId::Accuracy, std::nullopt};
const Metric kF1{MetricId::BinaryF1, std::nullopt};
const Metric kAM{MetricId::AM, std::nullopt};

// eta_2(x) = x[0] clipped to [0, 1].
ScorerPtr identity_scorer() {
  return fn_scorer(2, 1, [](std::span<const double> x) {
    const double p = std::clamp(x[0], 0.0, 1.0);
    return std::vector<double>{1 - p, p};
  });
}

LabeledSample calibrated_binary(std::size_t m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  LabeledSample s(2, 1);
  for (std::size_t k = 0; k < m; ++k) {
    const double p = u(rng);
    s.add(std::vector<double>{p}, u(rng) < p ? 1 : 0);
  }
  return s;
}

}  // namespace

TEST_CASE("weighted argmax classifier") {
  auto s = fn_scorer(3, 1, [](std::span<const double>) { return std::vector<double>{0.2, 0.5, 0.3}; });
  const auto r = weighted_argmax_classifier(GainMatrix::identity(3), s);
  CHECK(r.predict(std::vector<double>{0.0}) == std::vector<double>{0, 1, 0});
  auto half = fn_scorer(2, 1, [](std::span<const double>) { return std::vector<double>{0.5, 0.5}; });
  CHECK(weighted_argmax_classifier(GainMatrix::identity(2), half).predict(std::vector<double>{0.0}) ==
        std::vector<double>{0, 1});

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  GainMatrix g(3);
  for (double& v : g.entries()) v = u(rng);
  GainMatrix g3 = g;
  for (double& v : g3.entries()) v *= 3;
  for (int t = 0; t < 1000; ++t) {
    const auto eta = dirichlet(3, rng);
    CHECK(weighted_argmax_predict(g, eta) == weighted_argmax_predict(g3, eta));
  }
}

TEST_CASE("threshold search on separable calibrated scores") {
  // Labels are class 2 exactly when eta_2 > 0.5.
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> eta2;
  std::vector<int> labels;
  for (int k = 0; k < 200; ++k) {
    eta2.push_back(u(rng));
    labels.push_back(eta2.back() > 0.5 ? 1 : 0);
  }
  const auto [t, v] = best_threshold(eta2, labels, kAccuracy);
  CHECK(v == 1.0);
  // Exhaustive sweep over the distinct values: largest gap around 0.5.
  double below = 0.0, above = 1.0;
  for (double e : eta2) {
    if (e <= 0.5) below = std::max(below, e);
    if (e > 0.5) above = std::min(above, e);
  }
  CHECK(t >= below);
  CHECK(t < above);
  CHECK(std::abs(t - 0.5) <= above - below);
}

TEST_CASE("all positive tuning labels select threshold 0 for F1") {
  const std::vector<double> eta2{0.1, 0.4, 0.7, 0.9};
  const std::vector<int> labels{1, 1, 1, 1};
  const auto [t, v] = best_threshold(eta2, labels, kF1);
  CHECK(t == 0.0);
  CHECK(v == 1.0);
}

TEST_CASE("threshold plug-in beats every point of a uniform grid") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto s = calibrated_binary(400, seed);
    for (const Metric& m : {kAccuracy, kF1, kAM}) {
      const auto res = binary_threshold_plugin(s, m, {0.5, seed}, ScorerSource{{}, identity_scorer()});
      const auto tune = split_sample(s, {0.5, seed}).tune;
      std::vector<double> eta2;
      for (std::size_t k = 0; k < tune.size(); ++k) eta2.push_back(tune.x(k)[0]);
      for (int g = 0; g <= 1000; ++g) {
        CHECK(res.tune_value >= threshold_metric(eta2, tune.labels(), m, g / 1000.0));
      }
      CHECK(res.tune_value == threshold_metric(eta2, tune.labels(), m, res.threshold));
    }
  }
}

double grid_best(const std::vector<double>& eta2, const std::vector<int>& labels, const Metric& m) {
  double best = -INFINITY;
  for (int g = 0; g <= 10000; ++g) best = std::max(best, threshold_metric(eta2, labels, m, g / 10000.0));
  return best;
}

double min_gap(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  double g = INFINITY;
  for (std::size_t i = 1; i < v.size(); ++i) g = std::min(g, v[i] - v[i - 1]);
  return g;
}

TEST_CASE("midpoint search equals a fine uniform grid on finite-support scores") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 10; ++t) {
    // Support eta_2 levels at least 1e-3 apart, so every level gap holds a grid point.
    FiniteDistribution dist = random_finite_distribution(2, 8, rng);
    auto levels = [](const FiniteDistribution& d) {
      std::vector<double> v;
      for (const auto& p : d.points()) v.push_back(p.eta[1]);
      return v;
    };
    while (min_gap(levels(dist)) < 1e-3) dist = random_finite_distribution(2, 8, rng);
    const FiniteEtaOracle eta(dist);
    const auto s = sample_from(dist, 80, static_cast<std::uint64_t>(t));
    std::vector<double> eta2;
    for (std::size_t k = 0; k < s.size(); ++k) eta2.push_back(eta.predict(s.x(k))[1]);
    for (const Metric& m : {kAccuracy, kF1, kAM}) {
      CHECK(best_threshold(eta2, s.labels(), m).second == grid_best(eta2, s.labels(), m));
    }
  }
}

TEST_CASE("midpoint search dominates a fine uniform grid on continuous scores") {
  // Equality needs every gap between distinct scores to hold a grid point.
  for (std::uint64_t seed = 10; seed < 20; ++seed) {
    const auto s = calibrated_binary(60, seed);
    std::vector<double> eta2;
    for (std::size_t k = 0; k < s.size(); ++k) eta2.push_back(s.x(k)[0]);
    const bool resolved = min_gap(eta2) >= 1e-4;
    for (const Metric& m : {kAccuracy, kF1, kAM}) {
      const double mid = best_threshold(eta2, s.labels(), m).second;
      const double grid = grid_best(eta2, s.labels(), m);
      CHECK(mid >= grid);
      if (resolved) CHECK(mid == grid);
    }
  }
}

TEST_CASE("threshold ties go to the smaller threshold") {
  const std::vector<double> eta2{0.2, 0.4, 0.6, 0.8};
  const std::vector<int> labels{0, 0, 1, 1};
  // Accuracy 1 for every t in [0.4, 0.6); the midpoint 0.5 is the only candidate there, and
  // among equal-valued candidates the smallest wins.
  CHECK(best_threshold(eta2, labels, kAccuracy).first == 0.5);
  const std::vector<int> none{0, 0, 0, 0};
  // All-negative labels: every threshold at or above 0.8 gives accuracy 1; the first such
  // candidate is t = 1.
  CHECK(best_threshold(eta2, none, kAccuracy).first == 1.0);
}

TEST_CASE("threshold candidates include the midpoint to a score of exactly one") {
  const std::vector<double> eta2{0.5, 1.0};
  const std::vector<int> labels{0, 1};
  const auto [t, v] = best_threshold(eta2, labels, kAccuracy);
  CHECK(v == 1.0);
  CHECK(t == 0.75);
}

TEST_CASE("relabelling classes mirrors the threshold problem") {
  const auto s = calibrated_binary(300, 4);
  std::vector<double> eta2, eta1;
  std::vector<int> flipped;
  for (std::size_t k = 0; k < s.size(); ++k) {
    eta2.push_back(s.x(k)[0]);
    eta1.push_back(1.0 - s.x(k)[0]);
    flipped.push_back(1 - s.y(k));
  }
  CHECK(best_threshold(eta2, s.labels(), kAccuracy).second == doctest::Approx(best_threshold(eta1, flipped, kAccuracy).second));
  CHECK(best_threshold(eta2, s.labels(), kAM).second == doctest::Approx(best_threshold(eta1, flipped, kAM).second));
}

TEST_CASE("threshold plug-in rejects multiclass samples") {
  LabeledSample s(3, 1);
  for (int k = 0; k < 10; ++k) s.add(std::vector<double>{double(k)}, k % 3);
  CHECK_THROWS_AS(binary_threshold_plugin(s, kAccuracy, {}), Error);
}

TEST_CASE("gain candidates") {
  GainGridConfig small{3, 20000, 0};
  const auto c = gain_candidates(2, true, small);
  CHECK(c.front() == GainMatrix::identity(2));
  CHECK(c.size() == 2 * 2 * 3 * 3);  // identity is already on the grid
  for (const auto& g : c) {
    CHECK(g(0, 0) >= 0);
    CHECK(g(1, 1) >= 0);
  }
  CHECK(gain_candidates(2, false, small).size() == 81);
  const auto r = gain_candidates(3, true, GainGridConfig{5, 500, 7});
  CHECK(r.size() == 500);
  CHECK(r.front() == GainMatrix::identity(3));
  CHECK(gain_candidates(3, true, GainGridConfig{5, 500, 7}) == r);
  for (const auto& g : r) CHECK(g.max_abs() <= 1.0);
}

TEST_CASE("brute force includes the identity gain") {
  const auto synth = make_gaussian_synth(GaussianMixtureSpec::default_spec());
  const auto s = synth.sample(1000, 5);
  const auto res = brute_force_plugin(s, kAccuracy, {0.5, 1}, GainGridConfig{3, 5000, 1});
  const auto parts = split_sample(s, {0.5, 1});
  const auto ident = weighted_argmax_classifier(GainMatrix::identity(3), std::get<WeightedArgmaxRule>(res.rule.variant()).scorer);
  CHECK(res.tune_value >= eval_metric(MetricId::Accuracy, empirical_conf(ident, parts.tune)));
  CHECK(res.tune_value == doctest::Approx(eval_metric(MetricId::Accuracy, empirical_conf(res.rule, parts.tune))).epsilon(1e-14));
  const auto again = brute_force_plugin(s, kAccuracy, {0.5, 1}, GainGridConfig{3, 5000, 1});
  CHECK(again.gain == res.gain);
}

TEST_CASE("deterministic plug-ins score zero H-mean on the coin-flip distribution") {
  const auto dist = FiniteDistribution::one_hot({1.0}, {{0.5, 0.5}});
  const auto s = sample_from(dist, 200, 3);
  const auto res = brute_force_plugin(s, {MetricId::HMean, std::nullopt}, {0.5, 2}, GainGridConfig{5, 20000, 0},
                                      ScorerSource{{}, std::make_shared<FiniteEtaOracle>(dist)});
  CHECK(res.tune_value == 0.0);
  CHECK(eval_metric(MetricId::HMean, exact_conf(res.rule, dist)) == 0.0);
  // CPE-trained scorer gives the same verdict.
  const auto fitted = brute_force_plugin(s, {MetricId::HMean, std::nullopt}, {0.5, 2}, GainGridConfig{5, 20000, 0});
  CHECK(fitted.tune_value == 0.0);
}

TEST_CASE("brute force matches exhaustive labelings of the tuning split") {
  // Well-separated eta levels so the best labeling of the level sets is a threshold rule.
  const auto dist = FiniteDistribution::one_hot(
      {0.15, 0.2, 0.25, 0.2, 0.2}, {{0.95, 0.05}, {0.8, 0.2}, {0.55, 0.45}, {0.25, 0.75}, {0.05, 0.95}});
  const auto oracle = std::make_shared<FiniteEtaOracle>(dist);
  for (const Metric& m : {kAccuracy, kF1, kAM, Metric{MetricId::GMean, std::nullopt}}) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const auto s = sample_from(dist, 2000, seed);
      const auto res = brute_force_plugin(s, m, {0.5, seed}, GainGridConfig{11, 20000, 0}, ScorerSource{{}, oracle});
      const auto tune = split_sample(s, {0.5, seed}).tune;
      // counts[k][y]: tuning rows at support point k with label y.
      std::vector<std::array<double, 2>> counts(dist.size(), {0, 0});
      for (std::size_t r = 0; r < tune.size(); ++r) {
        std::size_t k = 0;
        while (tune.x(r)[k] != 1.0) ++k;
        counts[k][static_cast<std::size_t>(tune.y(r))] += 1;
      }
      double best = -INFINITY;
      for (unsigned mask = 0; mask < (1u << dist.size()); ++mask) {
        ConfusionMatrix c(2);
        for (std::size_t k = 0; k < dist.size(); ++k) {
          const int pred = (mask >> k) & 1u;
          for (int y = 0; y < 2; ++y) c(y, pred) += counts[k][y] / static_cast<double>(tune.size());
        }
        best = std::max(best, eval_metric(m.id, c));
      }
      INFO(m.to_string(), " seed ", seed);
      CHECK(res.tune_value == doctest::Approx(best).epsilon(1e-12));
    }
  }
}

TEST_CASE("exact-eta plug-in is optimal for its own linear metric") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 20; ++t) {
    const int n = 2 + t % 2;
    const int k = 3 + t % 5;
    const auto dist = random_finite_distribution(n, k, rng);
    GainMatrix g(n);
    for (double& v : g.entries()) v = u(rng);
    const double plug = inner(g, exact_conf(weighted_argmax_classifier(g, std::make_shared<FiniteEtaOracle>(dist)), dist));
    // Every labeling of the support.
    std::vector<int> lab(static_cast<std::size_t>(k), 0);
    while (true) {
      ConfusionMatrix c(n);
      for (int p = 0; p < k; ++p) {
        const auto& pt = dist.point(static_cast<std::size_t>(p));
        for (int i = 0; i < n; ++i) c(i, lab[p]) += pt.mass * pt.eta[i];
      }
      CHECK(plug >= inner(g, c) - 1e-12);
      int p = 0;
      while (p < k && ++lab[p] == n) lab[p++] = 0;
      if (p == k) break;
    }
  }
}

TEST_CASE("split sizes follow floor and ceil") {
  for (std::size_t m : {2u, 3u, 10u, 11u, 101u}) {
    for (double a : {0.1, 0.3, 0.5, 0.77}) {
      if (std::ceil(a * m) >= m) continue;
      const auto [m1, m2] = split_sizes(m, a);
      CHECK(m2 == static_cast<std::size_t>(std::ceil(a * m - 1e-12)));
      CHECK(m1 == static_cast<std::size_t>(std::floor((1 - a) * m + 1e-12)));
    }
  }
}
