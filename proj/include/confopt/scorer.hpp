#pragma once

#include <memory>
#include <span>

#include "confopt/matrix.hpp"

namespace confopt {

/// A class-probability function x -> eta(x) in the simplex. Either a trained CPE model or
/// the exact conditional of a synthetic distribution.
class Scorer {
 public:
  virtual ~Scorer() = default;

  virtual int num_classes() const = 0;
  virtual int dim() const = 0;

  /// Writes eta(x) into `out` (size num_classes()).
  virtual void predict_into(std::span<const double> x, std::span<double> out) const = 0;

  ClassDistribution predict(std::span<const double> x) const {
    ClassDistribution out(static_cast<std::size_t>(num_classes()));
    predict_into(x, out);
    return out;
  }
};

using ScorerPtr = std::shared_ptr<const Scorer>;

}  // namespace confopt
