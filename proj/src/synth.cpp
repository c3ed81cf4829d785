#include "confopt/synth.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "confopt/error.hpp"

namespace confopt {

LabeledSample sample_from(const FiniteDistribution& dist, std::size_t m, std::uint64_t seed) {
  if (m < 1) throw Error("sample size must be at least 1");
  std::mt19937_64 rng(seed);
  std::vector<double> masses;
  masses.reserve(dist.size());
  for (const auto& p : dist.points()) masses.push_back(p.mass);
  std::discrete_distribution<std::size_t> pick_point(masses.begin(), masses.end());
  std::vector<std::discrete_distribution<int>> pick_label;
  for (const auto& p : dist.points()) pick_label.emplace_back(p.eta.begin(), p.eta.end());

  LabeledSample s(dist.n(), dist.d());
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t i = pick_point(rng);
    s.add(dist.point(i).x, pick_label[i](rng));
  }
  return s;
}

GaussianMixtureSpec GaussianMixtureSpec::default_spec() {
  GaussianMixtureSpec s;
  s.n = 3;
  s.d = 2;
  s.priors = {0.5, 0.3, 0.2};
  const double pi = std::acos(-1.0);
  for (int y = 0; y < 3; ++y) {
    const double a = 2.0 * pi * y / 3.0;
    s.means.push_back({std::cos(a), std::sin(a)});
    s.variances.push_back({1.0, 1.0});
  }
  return s;
}

void GaussianMixtureSpec::validate() const {
  if (n < 2 || n > kMaxClasses) throw Error("Gaussian mixture needs between 2 and 64 classes");
  if (d < 1) throw Error("Gaussian mixture needs d >= 1");
  if (priors.size() != static_cast<std::size_t>(n)) throw Error("need one prior per class");
  check_simplex(priors, "Gaussian mixture priors");
  if (means.size() != static_cast<std::size_t>(n) || variances.size() != static_cast<std::size_t>(n)) {
    throw Error("need one mean and one variance vector per class");
  }
  for (int y = 0; y < n; ++y) {
    const auto& mu = means[static_cast<std::size_t>(y)];
    const auto& var = variances[static_cast<std::size_t>(y)];
    if (mu.size() != static_cast<std::size_t>(d) || var.size() != static_cast<std::size_t>(d)) {
      throw Error("class " + std::to_string(y + 1) + " mean or variance has the wrong dimension");
    }
    for (int j = 0; j < d; ++j) {
      if (!std::isfinite(mu[static_cast<std::size_t>(j)])) throw Error("non-finite mean");
      if (!(var[static_cast<std::size_t>(j)] > 0.0) || !std::isfinite(var[static_cast<std::size_t>(j)])) {
        throw Error("class " + std::to_string(y + 1) + " has a non-positive variance");
      }
    }
  }
}

bool GaussianMixtureSpec::shared_covariance() const {
  return std::all_of(variances.begin(), variances.end(), [&](const auto& v) { return v == variances.front(); });
}

GaussianEta::GaussianEta(GaussianMixtureSpec spec) : spec_(std::move(spec)) { spec_.validate(); }

void GaussianEta::predict_into(std::span<const double> x, std::span<double> out) const {
  if (x.size() != static_cast<std::size_t>(spec_.d)) throw Error("feature dimension mismatch");
  double mx = -INFINITY;
  for (int y = 0; y < spec_.n; ++y) {
    const auto& mu = spec_.means[static_cast<std::size_t>(y)];
    const auto& var = spec_.variances[static_cast<std::size_t>(y)];
    const double prior = spec_.priors[static_cast<std::size_t>(y)];
    double s = prior > 0.0 ? std::log(prior) : -INFINITY;
    for (int j = 0; j < spec_.d; ++j) {
      const double z = x[static_cast<std::size_t>(j)] - mu[static_cast<std::size_t>(j)];
      s -= 0.5 * (z * z / var[static_cast<std::size_t>(j)] + std::log(var[static_cast<std::size_t>(j)]));
    }
    out[static_cast<std::size_t>(y)] = s;
    mx = std::max(mx, s);
  }
  double total = 0.0;
  for (int y = 0; y < spec_.n; ++y) total += (out[static_cast<std::size_t>(y)] = std::exp(out[static_cast<std::size_t>(y)] - mx));
  for (int y = 0; y < spec_.n; ++y) out[static_cast<std::size_t>(y)] /= total;
}

GaussianSynth::GaussianSynth(GaussianMixtureSpec spec)
    : eta_(std::make_shared<const GaussianEta>(std::move(spec))) {}

LabeledSample GaussianSynth::sample(std::size_t m, std::uint64_t seed) const {
  if (m < 1) throw Error("sample size must be at least 1");
  const auto& s = spec();
  std::mt19937_64 rng(seed);
  std::discrete_distribution<int> pick(s.priors.begin(), s.priors.end());
  std::normal_distribution<double> normal(0.0, 1.0);
  LabeledSample out(s.n, s.d);
  std::vector<double> x(static_cast<std::size_t>(s.d));
  for (std::size_t k = 0; k < m; ++k) {
    const int y = pick(rng);
    for (int j = 0; j < s.d; ++j) {
      x[static_cast<std::size_t>(j)] = s.means[static_cast<std::size_t>(y)][static_cast<std::size_t>(j)] +
                                       std::sqrt(s.variances[static_cast<std::size_t>(y)][static_cast<std::size_t>(j)]) * normal(rng);
    }
    out.add(x, y);
  }
  return out;
}

ClassDistribution random_simplex_point(int n, std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  ClassDistribution p(static_cast<std::size_t>(n));
  double s = 0.0;
  for (double& v : p) s += (v = e(rng));
  for (double& v : p) v /= s;
  return p;
}

FiniteDistribution random_finite_distribution(int n, int k, std::mt19937_64& rng, double min_mass) {
  if (k < 1) throw Error("need at least one support point");
  auto q = random_simplex_point(k, rng);
  double s = 0.0;
  for (double& v : q) s += (v = std::max(v, min_mass));
  for (double& v : q) v /= s;
  std::vector<ClassDistribution> etas;
  for (int i = 0; i < k; ++i) etas.push_back(random_simplex_point(n, rng));
  // Renormalisation can leave the masses a few ulps off one; absorb that in the largest.
  double total = 0.0;
  for (double v : q) total += v;
  *std::max_element(q.begin(), q.end()) += 1.0 - total;
  return FiniteDistribution::one_hot(std::move(q), std::move(etas));
}

ConfusionMatrix random_interior_confusion(int n, std::mt19937_64& rng, double min_prior, double floor) {
  if (!(floor >= 0.0 && n * floor < 1.0)) throw Error("entry floor too large for n");
  auto pi = random_simplex_point(n, rng);
  double s = 0.0;
  for (double& v : pi) s += (v = std::max(v, min_prior));
  for (double& v : pi) v /= s;
  ConfusionMatrix c(n);
  for (int i = 0; i < n; ++i) {
    const auto row = random_simplex_point(n, rng);
    for (int j = 0; j < n; ++j) {
      c(i, j) = pi[static_cast<std::size_t>(i)] * (floor + (1.0 - n * floor) * row[static_cast<std::size_t>(j)]);
    }
  }
  return c;
}

}  // namespace confopt
