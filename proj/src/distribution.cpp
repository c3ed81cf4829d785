#include "confopt/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "confopt/error.hpp"

namespace confopt {

FiniteDistribution::FiniteDistribution(int n, int d, std::vector<SupportPoint> points)
    : n_(n), d_(d), points_(std::move(points)) {
  if (n < 1 || n > kMaxClasses) throw Error("class count must be in [1, 64]");
  if (points_.empty()) throw Error("distribution has no support points");
  double total = 0.0;
  for (std::size_t k = 0; k < points_.size(); ++k) {
    const auto& p = points_[k];
    if (p.x.size() != static_cast<std::size_t>(d)) {
      throw Error("support point " + std::to_string(k) + " has wrong feature dimension");
    }
    if (!(p.mass > 0.0) || !std::isfinite(p.mass)) {
      throw Error("support point " + std::to_string(k) + " has non-positive mass");
    }
    if (p.eta.size() != static_cast<std::size_t>(n)) {
      throw Error("support point " + std::to_string(k) + " has eta of wrong size");
    }
    check_simplex(p.eta, "eta of support point " + std::to_string(k));
    total += p.mass;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw Error("support masses sum to " + std::to_string(total) + ", expected 1");
  }
}

FiniteDistribution FiniteDistribution::one_hot(std::vector<double> masses,
                                               std::vector<ClassDistribution> etas) {
  if (masses.size() != etas.size() || masses.empty()) {
    throw Error("need one eta per support mass");
  }
  const int k = static_cast<int>(masses.size());
  const int n = static_cast<int>(etas.front().size());
  std::vector<SupportPoint> pts;
  pts.reserve(masses.size());
  for (int i = 0; i < k; ++i) {
    SupportPoint p;
    p.x.assign(static_cast<std::size_t>(k), 0.0);
    p.x[static_cast<std::size_t>(i)] = 1.0;
    p.mass = masses[static_cast<std::size_t>(i)];
    p.eta = std::move(etas[static_cast<std::size_t>(i)]);
    pts.push_back(std::move(p));
  }
  return FiniteDistribution(n, k, std::move(pts));
}

ClassDistribution FiniteDistribution::priors() const {
  ClassDistribution pi(static_cast<std::size_t>(n_), 0.0);
  for (const auto& p : points_) {
    for (int i = 0; i < n_; ++i) pi[static_cast<std::size_t>(i)] += p.mass * p.eta[static_cast<std::size_t>(i)];
  }
  return pi;
}

double FiniteDistribution::pi_min() const {
  const auto pi = priors();
  return *std::min_element(pi.begin(), pi.end());
}

FiniteEtaOracle::FiniteEtaOracle(FiniteDistribution dist) : dist_(std::move(dist)) {
  for (std::size_t k = 0; k < dist_.size(); ++k) {
    if (!index_.emplace(dist_.point(k).x, k).second) {
      throw Error("support points " + std::to_string(index_[dist_.point(k).x]) + " and " +
                  std::to_string(k) + " share a feature vector");
    }
  }
}

void FiniteEtaOracle::predict_into(std::span<const double> x, std::span<double> out) const {
  const auto it = index_.find(std::vector<double>(x.begin(), x.end()));
  if (it == index_.end()) throw Error("feature vector is not a support point of the distribution");
  const auto& eta = dist_.point(it->second).eta;
  std::copy(eta.begin(), eta.end(), out.begin());
}

}  // namespace confopt
