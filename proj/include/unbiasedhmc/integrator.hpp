#pragma once

#include <memory>
#include <utility>

#include <Eigen/Dense>

#include "unbiasedhmc/rng.hpp"
#include "unbiasedhmc/targets.hpp"

namespace uhmc {

struct PhasePoint {
  Eigen::VectorXd position;  // q
  Eigen::VectorXd momentum;  // p
};

// Kinetic-energy metric: identity, or a dense SPD matrix with its stored
// Cholesky factor. Momenta are drawn as factor * z with z standard normal,
// which costs exactly dim normal draws either way.
class MassMatrix {
 public:
  static MassMatrix identity(int dim);
  static MassMatrix dense(const Eigen::MatrixXd& m);

  bool is_identity() const noexcept { return dense_ == nullptr; }
  int dim() const noexcept { return dim_; }

  Eigen::VectorXd sample_momentum(Rng& rng) const;
  // M^{-1} p
  Eigen::VectorXd apply_inverse(const Eigen::VectorXd& p) const;
  // p^T M^{-1} p / 2
  double kinetic(const Eigen::VectorXd& p) const;

  const Eigen::MatrixXd& matrix() const;
  const Eigen::MatrixXd& factor() const;

 private:
  struct Dense {
    Eigen::MatrixXd matrix;
    Eigen::MatrixXd factor;
  };
  int dim_ = 0;
  std::shared_ptr<const Dense> dense_;
};

// E(q,p) = U(q) + p^T M^{-1} p / 2
double hamiltonian(const PhasePoint& point, const TargetModel& target, const MassMatrix& mass);

struct LeapfrogResult {
  PhasePoint point;
  bool divergent = false;  // non-finite value encountered during integration
};

// L steps of half-kick / drift / half-kick with endpoint gradients shared
// between consecutive steps: L+1 gradient evaluations total.
LeapfrogResult leapfrog(const PhasePoint& start, const TargetModel& target, double step_size,
                        int n_steps, const MassMatrix& mass);

// closed-form Hamiltonian flow for a one-dimensional Gaussian with mean mu
// and standard deviation sigma; the leap-frog test oracle.
std::pair<double, double> exact_gaussian_flow(double q0, double p0, double t, double mu,
                                              double sigma);

}  // namespace uhmc
