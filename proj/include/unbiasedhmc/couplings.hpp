#pragma once

#include <utility>

#include <Eigen/Dense>

#include "unbiasedhmc/kernels.hpp"
#include "unbiasedhmc/rng.hpp"
#include "unbiasedhmc/targets.hpp"

namespace uhmc {

// One pair of coupled chains: x carries the leading chain X_n, y the lagged
// chain Y_{n-1}. met never reverts once set; met implies x == y bit for bit.
struct CoupledState {
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  bool met = false;
  long iteration = 0;
};

// Draw layout shared by all coupled kernels: the d proposal/momentum normals
// come first, then the shared acceptance uniform, then any extra coupling
// randomness (momentum-coupling branch uniform, maximal-coupling rejection
// loop). The first chain therefore consumes exactly the marginal kernel's
// prefix of each per-iteration substream, which is what makes the coupled
// X-chain bitwise identical to a marginal run on the same stream.

// Common-momentum (kappa = 0) or reflection-momentum (kappa > 0) coupled
// Hamiltonian step. Both chains share the acceptance uniform and accept
// independently.
std::pair<StepOutcome, StepOutcome> coupled_hmc_step(Rng& rng, const Eigen::VectorXd& x,
                                                     const Eigen::VectorXd& y,
                                                     const TargetModel& target,
                                                     const KernelConfig& cfg);

// Momenta for the reflection-momentum coupling of the second chain given the
// chain difference delta = x - y. P1 is standard normal; P2 is either
// P1 + kappa*delta or the Householder reflection of P1 across the normalized
// difference, chosen with the stated density-ratio probability. Consumes d
// normals, then one branch uniform (none when kappa == 0 or delta == 0).
std::pair<Eigen::VectorXd, Eigen::VectorXd> sample_coupled_momentum(Rng& rng,
                                                                    const Eigen::VectorXd& delta,
                                                                    double kappa);

struct MaxCouplingResult {
  Eigen::VectorXd first;
  Eigen::VectorXd second;
  bool same = false;  // bitwise equality of the two proposals
};

// Maximal coupling of N(mean_x, sigma^2 I) and N(mean_y, sigma^2 I): the
// probability of {first == second} equals one minus the total variation
// distance between the two distributions.
MaxCouplingResult max_coupling_gaussian(Rng& rng, const Eigen::VectorXd& mean_x,
                                        const Eigen::VectorXd& mean_y, double sigma);

// Random walk proposals from the maximal coupling, accepted against each
// chain's own ratio with a single shared uniform.
std::pair<StepOutcome, StepOutcome> coupled_rwmh_step(Rng& rng, const Eigen::VectorXd& x,
                                                      const Eigen::VectorXd& y,
                                                      const TargetModel& target, double sigma);

// Coupled Langevin step: maximal coupling of the two Langevin proposals when
// |x - y| <= delta0, synchronous coupling (shared noise) otherwise.
std::pair<StepOutcome, StepOutcome> coupled_mala_step(Rng& rng, const Eigen::VectorXd& x,
                                                      const Eigen::VectorXd& y,
                                                      const TargetModel& target, double step_size,
                                                      double delta0);

// One step of the coupled mixture kernel: a shared selection uniform picks
// the coupled random-walk branch with probability gamma, the coupled
// Hamiltonian branch otherwise. After meeting only one chain is evolved with
// the marginal mixture kernel and mirrored.
CoupledState coupled_mixture_step(Rng& rng, const CoupledState& state, const TargetModel& target,
                                  const KernelConfig& cfg);

}  // namespace uhmc
