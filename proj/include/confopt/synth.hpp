#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "confopt/distribution.hpp"
#include "confopt/matrix.hpp"
#include "confopt/sample.hpp"
#include "confopt/scorer.hpp"

namespace confopt {

/// m i.i.d. draws: support point k with probability q_k, then label i with probability eta_k[i].
LabeledSample sample_from(const FiniteDistribution& dist, std::size_t m, std::uint64_t seed);

/// Class-conditional Gaussians with diagonal covariances.
struct GaussianMixtureSpec {
  int n = 3;
  int d = 2;
  std::vector<double> priors;
  std::vector<std::vector<double>> means;      // n x d
  std::vector<std::vector<double>> variances;  // n x d, diagonal covariance per class
  std::uint64_t seed = 0;

  /// n = 3, d = 2, priors (0.5, 0.3, 0.2), unit-circle means at 0/120/240 degrees, shared
  /// identity covariance.
  static GaussianMixtureSpec default_spec();

  void validate() const;
  bool shared_covariance() const;
};

/// Exact posterior eta(x) of a Gaussian mixture.
class GaussianEta final : public Scorer {
 public:
  explicit GaussianEta(GaussianMixtureSpec spec);

  int num_classes() const override { return spec_.n; }
  int dim() const override { return spec_.d; }
  void predict_into(std::span<const double> x, std::span<double> out) const override;

  const GaussianMixtureSpec& spec() const { return spec_; }

 private:
  GaussianMixtureSpec spec_;
};

/// Sampler plus exact-eta evaluator for a Gaussian mixture.
class GaussianSynth {
 public:
  explicit GaussianSynth(GaussianMixtureSpec spec);

  const GaussianMixtureSpec& spec() const { return eta_->spec(); }
  std::shared_ptr<const GaussianEta> eta() const { return eta_; }

  /// Label from the prior, then x from that class's Gaussian.
  LabeledSample sample(std::size_t m, std::uint64_t seed) const;

 private:
  std::shared_ptr<const GaussianEta> eta_;
};

inline GaussianSynth make_gaussian_synth(GaussianMixtureSpec spec) { return GaussianSynth(std::move(spec)); }

inline LabeledSample sample_from(const GaussianMixtureSpec& spec, std::size_t m, std::uint64_t seed) {
  return GaussianSynth(spec).sample(m, seed);
}

/// Dirichlet(1, ..., 1) draw.
ClassDistribution random_simplex_point(int n, std::mt19937_64& rng);

/// Random finite distribution with one-hot features: masses and each eta_k uniform on the
/// simplex, masses floored at `min_mass` before renormalising.
FiniteDistribution random_finite_distribution(int n, int k, std::mt19937_64& rng, double min_mass = 0.05);

/// Feasible-looking confusion matrix with every entry at least `floor` * its row prior share:
/// priors drawn from the simplex and floored at `min_prior`.
ConfusionMatrix random_interior_confusion(int n, std::mt19937_64& rng, double min_prior = 0.05,
                                          double floor = 0.02);

}  // namespace confopt
