#include "confopt/matrix.hpp"

#include <cmath>
#include <string>

#include "confopt/error.hpp"

namespace confopt {

void check_simplex(std::span<const double> p, std::string_view what, double tol) {
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!std::isfinite(p[i]) || p[i] < -tol) {
      throw Error(std::string(what) + ": entry " + std::to_string(i) + " is " +
                  std::to_string(p[i]) + ", not a probability");
    }
    sum += p[i];
  }
  if (p.empty() || std::abs(sum - 1.0) > tol) {
    throw Error(std::string(what) + ": entries sum to " + std::to_string(sum) + ", expected 1");
  }
}

Matrix::Matrix(int n) : n_(n), a_(static_cast<std::size_t>(n * n), 0.0) {
  if (n < 1 || n > kMaxClasses) {
    throw Error("class count " + std::to_string(n) + " outside [1, " + std::to_string(kMaxClasses) + "]");
  }
}

Matrix::Matrix(int n, std::vector<double> entries) : Matrix(n) {
  if (entries.size() != a_.size()) {
    throw Error("matrix of size " + std::to_string(n) + " needs " + std::to_string(a_.size()) +
                " entries, got " + std::to_string(entries.size()));
  }
  a_ = std::move(entries);
}

Matrix Matrix::identity(int n) {
  Matrix m(n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

double Matrix::row_sum(int i) const {
  double s = 0.0;
  for (int j = 0; j < n_; ++j) s += (*this)(i, j);
  return s;
}

double Matrix::col_sum(int j) const {
  double s = 0.0;
  for (int i = 0; i < n_; ++i) s += (*this)(i, j);
  return s;
}

double Matrix::total() const {
  double s = 0.0;
  for (double v : a_) s += v;
  return s;
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (double v : a_) m = std::max(m, std::abs(v));
  return m;
}

bool Matrix::all_finite() const {
  for (double v : a_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

std::vector<double> ConfusionMatrix::row_sums() const {
  std::vector<double> r(static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i) r[static_cast<std::size_t>(i)] = row_sum(i);
  return r;
}

void ConfusionMatrix::validate(std::span<const double> priors, double tol) const {
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) {
      const double v = (*this)(i, j);
      if (!std::isfinite(v) || v < -tol) {
        throw Error("confusion entry (" + std::to_string(i) + ", " + std::to_string(j) + ") is " +
                    std::to_string(v));
      }
    }
  }
  if (std::abs(total() - 1.0) > tol) {
    throw Error("confusion entries sum to " + std::to_string(total()));
  }
  if (!priors.empty()) {
    if (priors.size() != static_cast<std::size_t>(n_)) throw Error("prior vector has wrong size");
    for (int i = 0; i < n_; ++i) {
      if (std::abs(row_sum(i) - priors[static_cast<std::size_t>(i)]) > tol) {
        throw Error("confusion row " + std::to_string(i) + " sums to " + std::to_string(row_sum(i)) +
                    ", prior is " + std::to_string(priors[static_cast<std::size_t>(i)]));
      }
    }
  }
}

double inner(const Matrix& a, const Matrix& b) {
  if (a.n() != b.n()) throw Error("inner product of matrices with different n");
  double s = 0.0;
  const auto x = a.entries();
  const auto y = b.entries();
  for (std::size_t k = 0; k < x.size(); ++k) s += x[k] * y[k];
  return s;
}

double l1_distance(const Matrix& a, const Matrix& b) {
  if (a.n() != b.n()) throw Error("distance between matrices with different n");
  double s = 0.0;
  const auto x = a.entries();
  const auto y = b.entries();
  for (std::size_t k = 0; k < x.size(); ++k) s += std::abs(x[k] - y[k]);
  return s;
}

int argmax_last(std::span<const double> v) {
  int best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] >= v[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
  }
  return best;
}

}  // namespace confopt
