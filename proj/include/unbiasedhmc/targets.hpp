#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace uhmc {

struct AnalyticMoments {
  Eigen::VectorXd mean;           // E[x_i]
  Eigen::VectorXd second_moment;  // E[x_i^2]
};

// A target distribution pi(dq) proportional to exp(-U(q)) dq, carried around
// as its potential and exact gradient. Immutable after construction and
// freely shared across replicates; both callables are pure.
struct TargetModel {
  int dim = 0;
  std::string name;
  std::function<double(const Eigen::VectorXd&)> potential;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
  std::optional<AnalyticMoments> analytic_moments;
};

// ---------------------------------------------------------------------------
// Gaussian

struct IsotropicCovariance {
  double variance = 1.0;
};
using CovarianceSpec = std::variant<IsotropicCovariance, Eigen::MatrixXd>;

TargetModel gaussian_target(const Eigen::VectorXd& mean, const CovarianceSpec& covariance);
TargetModel standard_gaussian_target(int dim);

// ---------------------------------------------------------------------------
// Rosenbrock: U(x1,x2) = (1-x1)^2 + 10 (x2 - x1^2)^2

TargetModel rosenbrock_target();

// ---------------------------------------------------------------------------
// Bayesian logistic regression

struct FixedGaussianPrior {
  double shrinkage = 1.0;      // zeta
  Eigen::MatrixXd covariance;  // prior covariance Sigma (before 1/zeta scaling)
};

// a | s2 ~ N(0, s2), b | s2 ~ N(0, s2 I), s2 ~ Exponential(rate); the chain
// state is (a, b, log s2).
struct HierarchicalPrior {
  double exp_rate = 0.01;
};

struct LogisticModelSpec {
  Eigen::MatrixXd design;     // N x d' standardized design
  Eigen::VectorXd responses;  // 0/1
  std::variant<FixedGaussianPrior, HierarchicalPrior> prior = HierarchicalPrior{};
};

TargetModel logistic_target(const LogisticModelSpec& spec);

// ---------------------------------------------------------------------------
// Log-Gaussian Cox process on an n x n grid

struct CoxModelSpec {
  int grid_side = 0;            // n
  double signal_variance = 0.;  // s^2
  double length_scale = 0.;     // b
  double mean = 0.;             // mu
  double cell_area = 0.;        // a = n^-2
  Eigen::VectorXd counts;       // y, length n^2, row-major over grid indices
  Eigen::MatrixXd covariance_factor;  // lower-triangular L with L L^T = Sigma
};

// Sigma_{i,j} = s^2 exp(-|i-j|/(n b)) with i,j in {1,...,n}^2 and |i-j| the
// Euclidean distance between integer multi-indices.
Eigen::MatrixXd build_cox_covariance(int n, double signal_variance, double length_scale);

CoxModelSpec make_cox_spec(int n, double signal_variance, double length_scale, double mean,
                           const Eigen::VectorXd& counts);

TargetModel cox_target(const CoxModelSpec& spec);

// constant metric Sigma^{-1} + a exp(mu + s^2/2) I used to precondition the
// Cox sampler.
Eigen::MatrixXd cox_metric(const CoxModelSpec& spec);

// ---------------------------------------------------------------------------
// Dataset ingestion

// Numeric delimited text, one observation per row, response in the last
// column (0/1). Raw covariates are expanded with all pairwise interactions
// (original columns first, then products (i,j) with i<j in lexicographic
// order), then every column is standardized to sample mean 0 and sample
// standard deviation 1.
LogisticModelSpec load_german_credit(const std::string& path,
                                     std::variant<FixedGaussianPrior, HierarchicalPrior> prior =
                                         HierarchicalPrior{});

// Two-column delimited text of point coordinates in [0,1]^2, binned into an
// n x n grid of counts.
Eigen::VectorXd load_pines_counts(const std::string& path, int n);

CoxModelSpec load_pines(const std::string& path, int n, double signal_variance = 1.91,
                        double length_scale = 1.0 / 33.0);

}  // namespace uhmc
