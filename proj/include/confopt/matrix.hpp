#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace confopt {

inline constexpr int kMaxClasses = 64;
inline constexpr double kSimplexTol = 1e-9;

/// A probability vector over classes. Also used for eta(x) and randomized outputs h(x).
using ClassDistribution = std::vector<double>;

/// Throws Error naming the offending index when `p` is not in the simplex (tolerance 1e-9).
void check_simplex(std::span<const double> p, std::string_view what, double tol = kSimplexTol);

/// Dense row-major n x n matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(int n);
  Matrix(int n, std::vector<double> entries);

  static Matrix identity(int n);

  int n() const { return n_; }
  double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i * n_ + j)]; }
  double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i * n_ + j)]; }

  std::span<const double> entries() const { return a_; }
  std::span<double> entries() { return a_; }

  double row_sum(int i) const;
  double col_sum(int j) const;
  double total() const;
  double max_abs() const;
  bool all_finite() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 protected:
  int n_ = 0;
  std::vector<double> a_;
};

/// Entry (i, j) is the joint probability P(Y = i, prediction = j); classes are 0-based.
class ConfusionMatrix : public Matrix {
 public:
  using Matrix::Matrix;
  explicit ConfusionMatrix(Matrix m) : Matrix(std::move(m)) {}

  std::vector<double> row_sums() const;

  /// Nonnegative entries summing to one; when `priors` is non-empty the row sums must match it.
  void validate(std::span<const double> priors = {}, double tol = kSimplexTol) const;
};

/// Gain matrix G of the linear metric <C, G>. Column y scores prediction y.
class GainMatrix : public Matrix {
 public:
  using Matrix::Matrix;
  explicit GainMatrix(Matrix m) : Matrix(std::move(m)) {}

  static GainMatrix identity(int n) { return GainMatrix(Matrix::identity(n)); }
};

double inner(const Matrix& a, const Matrix& b);

/// Entrywise l1 distance.
double l1_distance(const Matrix& a, const Matrix& b);

/// Index of the largest value; ties go to the larger index.
int argmax_last(std::span<const double> v);

}  // namespace confopt
