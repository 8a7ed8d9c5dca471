#include "unbiasedhmc/kernels.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace uhmc {

void KernelConfig::validate(int target_dim) const {
  if (!(step_size > 0.0)) throw std::invalid_argument("step_size: must be positive");
  if (leapfrog_steps < 1) throw std::invalid_argument("leapfrog_steps: must be >= 1");
  if (!(rwmh_scale > 0.0)) throw std::invalid_argument("rwmh_scale: must be positive");
  if (!(mixture_weight > 0.0 && mixture_weight < 1.0)) {
    throw std::invalid_argument("mixture_weight: must lie in (0,1)");
  }
  if (!(momentum_coupling >= 0.0)) throw std::invalid_argument("momentum_coupling: must be >= 0");
  if (!(mala_threshold > 0.0)) throw std::invalid_argument("mala_threshold: must be positive");
  if (mass.dim() != target_dim) {
    throw std::invalid_argument("mass: dimension " + std::to_string(mass.dim()) +
                                " does not match target dimension " + std::to_string(target_dim));
  }
  if (momentum_coupling > 0.0 && !mass.is_identity()) {
    throw std::invalid_argument(
        "momentum_coupling: the reflection-momentum coupling is defined for the identity mass "
        "matrix only");
  }
}

StepOutcome hmc_step(Rng& rng, const Eigen::VectorXd& q, const TargetModel& target,
                     const KernelConfig& cfg) {
  PhasePoint start{q, cfg.mass.sample_momentum(rng)};
  const double u = rng.uniform();

  const double energy0 = hamiltonian(start, target, cfg.mass);
  LeapfrogResult traj = leapfrog(start, target, cfg.step_size, cfg.leapfrog_steps, cfg.mass);

  StepOutcome out;
  out.kernel_tag = KernelTag::kHmc;
  out.proposal = traj.point.position;

  double log_alpha = -std::numeric_limits<double>::infinity();
  if (!traj.divergent) {
    const double energy1 = hamiltonian(traj.point, target, cfg.mass);
    if (std::isfinite(energy1)) log_alpha = energy0 - energy1;
  }
  if (u < std::exp(std::min(0.0, log_alpha))) {
    out.accepted = true;
    out.new_state = traj.point.position;
  } else {
    out.accepted = false;
    out.new_state = q;
  }
  return out;
}

StepOutcome rwmh_step(Rng& rng, const Eigen::VectorXd& q, const TargetModel& target,
                      double sigma) {
  Eigen::VectorXd proposal = q + sigma * rng.normal_vector(q.size());
  const double u = rng.uniform();

  StepOutcome out;
  out.kernel_tag = KernelTag::kRwmh;
  out.proposal = proposal;

  const double u_cur = target.potential(q);
  const double u_prop = target.potential(proposal);
  double log_alpha = -std::numeric_limits<double>::infinity();
  if (std::isfinite(u_prop)) log_alpha = u_cur - u_prop;

  if (u < std::exp(std::min(0.0, log_alpha))) {
    out.accepted = true;
    out.new_state = std::move(proposal);
  } else {
    out.accepted = false;
    out.new_state = q;
  }
  return out;
}

StepOutcome mala_step(Rng& rng, const Eigen::VectorXd& q, const TargetModel& target,
                      double step_size) {
  const double eps = step_size;
  Eigen::VectorXd noise = rng.normal_vector(q.size());
  const double u = rng.uniform();

  StepOutcome out;
  out.kernel_tag = KernelTag::kHmc;  // marginally an L=1 Hamiltonian move

  Eigen::VectorXd grad_q = target.gradient(q);
  double log_alpha = -std::numeric_limits<double>::infinity();
  if (grad_q.allFinite()) {
    // proposal assembled exactly like one leap-frog step so that paired runs
    // against hmc_step(L=1) produce bit-identical states
    Eigen::VectorXd p_half = noise - (eps / 2.0) * grad_q;
    Eigen::VectorXd proposal = q + eps * p_half;
    out.proposal = proposal;

    Eigen::VectorXd grad_p = target.gradient(proposal);
    const double u_prop = target.potential(proposal);
    if (proposal.allFinite() && grad_p.allFinite() && std::isfinite(u_prop)) {
      const Eigen::VectorXd mean_fwd = q - (eps * eps / 2.0) * grad_q;
      const Eigen::VectorXd mean_bwd = proposal - (eps * eps / 2.0) * grad_p;
      const double log_fwd = -(proposal - mean_fwd).squaredNorm() / (2.0 * eps * eps);
      const double log_bwd = -(q - mean_bwd).squaredNorm() / (2.0 * eps * eps);
      log_alpha = target.potential(q) - u_prop + log_bwd - log_fwd;
    }
    if (u < std::exp(std::min(0.0, log_alpha))) {
      out.accepted = true;
      out.new_state = std::move(proposal);
      return out;
    }
  } else {
    out.proposal = q;
  }
  out.accepted = false;
  out.new_state = q;
  return out;
}

StepOutcome mixture_step(Rng& rng, const Eigen::VectorXd& q, const TargetModel& target,
                         const KernelConfig& cfg) {
  // selection uniform drawn before any kernel work
  const double select = rng.uniform();
  if (select < cfg.mixture_weight) {
    return rwmh_step(rng, q, target, cfg.rwmh_scale);
  }
  return hmc_step(rng, q, target, cfg);
}

}  // namespace uhmc
