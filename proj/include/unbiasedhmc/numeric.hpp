#pragma once

#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace uhmc {

// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
// Throws std::invalid_argument naming the failing pivot when the matrix is
// not SPD; callers rely on that diagnostic.
inline Eigen::MatrixXd cholesky_lower(const Eigen::MatrixXd& m, const std::string& what) {
  if (m.rows() != m.cols()) throw std::invalid_argument(what + ": matrix is not square");
  const Eigen::Index n = m.rows();
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double pivot = m(j, j) - l.row(j).head(j).squaredNorm();
    if (!(pivot > 0.0)) {
      throw std::invalid_argument(what + ": not positive definite, pivot " +
                                  std::to_string(j) + " = " + std::to_string(pivot));
    }
    pivot = std::sqrt(pivot);
    l(j, j) = pivot;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      l(i, j) = (m(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / pivot;
    }
  }
  return l;
}

// exact (bit-level) equality of two vectors; meeting detection needs no tolerance.
inline bool bitwise_equal(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) return false;
  return std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

// log(1 + exp(-t)), stable for all t.
inline double softplus_neg(double t) {
  if (t > 0.0) return std::log1p(std::exp(-t));
  return -t + std::log1p(std::exp(t));
}

inline double logistic_sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

// Neumaier-compensated accumulator; replication summaries must not depend on
// reduction order, so all cross-replicate sums go through this.
class CompensatedSum {
 public:
  void add(double v) noexcept {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace uhmc
