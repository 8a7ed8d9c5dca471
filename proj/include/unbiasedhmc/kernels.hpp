#pragma once

#include <Eigen/Dense>

#include "unbiasedhmc/integrator.hpp"
#include "unbiasedhmc/rng.hpp"
#include "unbiasedhmc/targets.hpp"

namespace uhmc {

struct KernelConfig {
  double step_size = 0.1;        // epsilon
  int leapfrog_steps = 10;       // L
  double rwmh_scale = 1e-3;      // sigma
  double mixture_weight = 0.05;  // gamma
  double momentum_coupling = 0.0;  // kappa
  MassMatrix mass = MassMatrix::identity(1);
  double mala_threshold = 1.0;  // delta_0, coupled MALA only

  // throws std::invalid_argument naming the offending field
  void validate(int target_dim) const;
};

enum class KernelTag { kHmc, kRwmh };

struct StepOutcome {
  Eigen::VectorXd new_state;
  bool accepted = false;
  KernelTag kernel_tag = KernelTag::kHmc;
  Eigen::VectorXd proposal;
};

// Every step consumes exactly d normals then one acceptance uniform, in that
// order; mixture_step draws one extra selection uniform first. Divergent or
// non-finite proposals reject, with the uniform still consumed so the stream
// layout never depends on outcomes.
StepOutcome hmc_step(Rng& rng, const Eigen::VectorXd& q, const TargetModel& target,
                     const KernelConfig& cfg);
StepOutcome rwmh_step(Rng& rng, const Eigen::VectorXd& q, const TargetModel& target, double sigma);
StepOutcome mala_step(Rng& rng, const Eigen::VectorXd& q, const TargetModel& target,
                      double step_size);
StepOutcome mixture_step(Rng& rng, const Eigen::VectorXd& q, const TargetModel& target,
                         const KernelConfig& cfg);

}  // namespace uhmc
