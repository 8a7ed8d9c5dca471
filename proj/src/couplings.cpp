#include "unbiasedhmc/couplings.hpp"

#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "unbiasedhmc/numeric.hpp"

namespace uhmc {

namespace {

constexpr long kMaxCouplingRejectionCap = 1000000;

double log_accept_hmc(const TargetModel& target, const MassMatrix& mass, const PhasePoint& start,
                      const LeapfrogResult& traj) {
  if (traj.divergent) return -std::numeric_limits<double>::infinity();
  const double e0 = hamiltonian(start, target, mass);
  const double e1 = hamiltonian(traj.point, target, mass);
  if (!std::isfinite(e1)) return -std::numeric_limits<double>::infinity();
  return e0 - e1;
}

// second-chain momentum given the first chain's standard-normal draw;
// consumes the branch uniform only when the coupling is non-degenerate.
Eigen::VectorXd couple_momentum(Rng& rng, const Eigen::VectorXd& p1, const Eigen::VectorXd& delta,
                                double kappa) {
  const double dist = delta.norm();
  if (kappa == 0.0 || dist == 0.0) return p1;
  const Eigen::VectorXd unit = delta / dist;
  const double along = unit.dot(p1);
  // N(along + kappa|delta|; 0,1) / N(along; 0,1)
  const double log_ratio =
      -0.5 * (along + kappa * dist) * (along + kappa * dist) + 0.5 * along * along;
  const double branch = rng.uniform();
  if (branch < std::exp(std::min(0.0, log_ratio)) || log_ratio >= 0.0) {
    return p1 + kappa * delta;
  }
  return p1 - 2.0 * along * unit;
}

// finishes the maximal coupling once the first proposal has been drawn;
// densities are compared on the log scale (isotropic, common sigma).
MaxCouplingResult max_coupling_complete(Rng& rng, Eigen::VectorXd x_star,
                                        const Eigen::VectorXd& mean_x,
                                        const Eigen::VectorXd& mean_y, double sigma) {
  const double inv_two_var = 1.0 / (2.0 * sigma * sigma);
  MaxCouplingResult out;
  const double log_px = -(x_star - mean_x).squaredNorm() * inv_two_var;
  const double log_py = -(x_star - mean_y).squaredNorm() * inv_two_var;
  const double w = rng.uniform();
  if (std::log(w) + log_px <= log_py) {
    out.second = x_star;
    out.first = std::move(x_star);
    out.same = true;
    return out;
  }
  for (long attempt = 0; attempt < kMaxCouplingRejectionCap; ++attempt) {
    Eigen::VectorXd candidate = mean_y + sigma * rng.normal_vector(mean_y.size());
    const double log_qy = -(candidate - mean_y).squaredNorm() * inv_two_var;
    const double log_qx = -(candidate - mean_x).squaredNorm() * inv_two_var;
    const double w2 = rng.uniform();
    if (std::log(w2) + log_qy > log_qx) {
      out.first = std::move(x_star);
      out.second = std::move(candidate);
      out.same = false;
      return out;
    }
  }
  throw std::runtime_error("max_coupling_gaussian: rejection loop exceeded " +
                           std::to_string(kMaxCouplingRejectionCap) + " iterations");
}

}  // namespace

std::pair<Eigen::VectorXd, Eigen::VectorXd> sample_coupled_momentum(Rng& rng,
                                                                    const Eigen::VectorXd& delta,
                                                                    double kappa) {
  Eigen::VectorXd p1 = rng.normal_vector(delta.size());
  Eigen::VectorXd p2 = couple_momentum(rng, p1, delta, kappa);
  return {std::move(p1), std::move(p2)};
}

std::pair<StepOutcome, StepOutcome> coupled_hmc_step(Rng& rng, const Eigen::VectorXd& x,
                                                     const Eigen::VectorXd& y,
                                                     const TargetModel& target,
                                                     const KernelConfig& cfg) {
  Eigen::VectorXd p1 = cfg.mass.sample_momentum(rng);
  const double u = rng.uniform();
  Eigen::VectorXd p2 = couple_momentum(rng, p1, x - y, cfg.momentum_coupling);

  PhasePoint start_x{x, std::move(p1)};
  PhasePoint start_y{y, std::move(p2)};
  LeapfrogResult traj_x = leapfrog(start_x, target, cfg.step_size, cfg.leapfrog_steps, cfg.mass);
  LeapfrogResult traj_y = leapfrog(start_y, target, cfg.step_size, cfg.leapfrog_steps, cfg.mass);

  StepOutcome out_x;
  out_x.kernel_tag = KernelTag::kHmc;
  out_x.proposal = traj_x.point.position;
  if (u < std::exp(std::min(0.0, log_accept_hmc(target, cfg.mass, start_x, traj_x)))) {
    out_x.accepted = true;
    out_x.new_state = traj_x.point.position;
  } else {
    out_x.new_state = x;
  }

  StepOutcome out_y;
  out_y.kernel_tag = KernelTag::kHmc;
  out_y.proposal = traj_y.point.position;
  if (u < std::exp(std::min(0.0, log_accept_hmc(target, cfg.mass, start_y, traj_y)))) {
    out_y.accepted = true;
    out_y.new_state = traj_y.point.position;
  } else {
    out_y.new_state = y;
  }
  return {std::move(out_x), std::move(out_y)};
}

MaxCouplingResult max_coupling_gaussian(Rng& rng, const Eigen::VectorXd& mean_x,
                                        const Eigen::VectorXd& mean_y, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("max_coupling_gaussian: sigma must be positive");
  if (mean_x.size() != mean_y.size()) {
    throw std::invalid_argument("max_coupling_gaussian: mean dimensions differ");
  }
  Eigen::VectorXd x_star = mean_x + sigma * rng.normal_vector(mean_x.size());
  return max_coupling_complete(rng, std::move(x_star), mean_x, mean_y, sigma);
}

std::pair<StepOutcome, StepOutcome> coupled_rwmh_step(Rng& rng, const Eigen::VectorXd& x,
                                                      const Eigen::VectorXd& y,
                                                      const TargetModel& target, double sigma) {
  Eigen::VectorXd x_star = x + sigma * rng.normal_vector(x.size());
  const double u = rng.uniform();
  MaxCouplingResult prop = max_coupling_complete(rng, std::move(x_star), x, y, sigma);

  const double pot_x = target.potential(x);
  const double pot_y = target.potential(y);
  const double pot_xs = target.potential(prop.first);
  const double pot_ys = prop.same ? pot_xs : target.potential(prop.second);

  StepOutcome out_x;
  out_x.kernel_tag = KernelTag::kRwmh;
  out_x.proposal = prop.first;
  double log_ax = std::isfinite(pot_xs) ? pot_x - pot_xs
                                        : -std::numeric_limits<double>::infinity();
  if (u < std::exp(std::min(0.0, log_ax))) {
    out_x.accepted = true;
    out_x.new_state = prop.first;
  } else {
    out_x.new_state = x;
  }

  StepOutcome out_y;
  out_y.kernel_tag = KernelTag::kRwmh;
  out_y.proposal = prop.second;
  double log_ay = std::isfinite(pot_ys) ? pot_y - pot_ys
                                        : -std::numeric_limits<double>::infinity();
  if (u < std::exp(std::min(0.0, log_ay))) {
    out_y.accepted = true;
    out_y.new_state = prop.second;
  } else {
    out_y.new_state = y;
  }
  return {std::move(out_x), std::move(out_y)};
}

std::pair<StepOutcome, StepOutcome> coupled_mala_step(Rng& rng, const Eigen::VectorXd& x,
                                                      const Eigen::VectorXd& y,
                                                      const TargetModel& target, double step_size,
                                                      double delta0) {
  const double eps = step_size;
  Eigen::VectorXd noise = rng.normal_vector(x.size());
  const double u = rng.uniform();

  Eigen::VectorXd grad_x = target.gradient(x);
  Eigen::VectorXd grad_y = target.gradient(y);
  const Eigen::VectorXd mean_x = x - (eps * eps / 2.0) * grad_x;
  const Eigen::VectorXd mean_y = y - (eps * eps / 2.0) * grad_y;

  Eigen::VectorXd prop_x;
  Eigen::VectorXd prop_y;
  bool same = false;
  if ((x - y).norm() <= delta0) {
    Eigen::VectorXd x_star = mean_x + eps * noise;
    MaxCouplingResult coupled = max_coupling_complete(rng, std::move(x_star), mean_x, mean_y, eps);
    prop_x = std::move(coupled.first);
    prop_y = std::move(coupled.second);
    same = coupled.same;
  } else {
    prop_x = mean_x + eps * noise;
    prop_y = mean_y + eps * noise;
  }

  auto mala_log_accept = [&](const Eigen::VectorXd& from, const Eigen::VectorXd& to,
                             const Eigen::VectorXd& mean_fwd) {
    const double pot_to = target.potential(to);
    Eigen::VectorXd grad_to = target.gradient(to);
    if (!to.allFinite() || !std::isfinite(pot_to) || !grad_to.allFinite()) {
      return -std::numeric_limits<double>::infinity();
    }
    const Eigen::VectorXd mean_bwd = to - (eps * eps / 2.0) * grad_to;
    const double log_fwd = -(to - mean_fwd).squaredNorm() / (2.0 * eps * eps);
    const double log_bwd = -(from - mean_bwd).squaredNorm() / (2.0 * eps * eps);
    return target.potential(from) - pot_to + log_bwd - log_fwd;
  };

  StepOutcome out_x;
  out_x.kernel_tag = KernelTag::kHmc;
  out_x.proposal = prop_x;
  if (grad_x.allFinite() && u < std::exp(std::min(0.0, mala_log_accept(x, prop_x, mean_x)))) {
    out_x.accepted = true;
    out_x.new_state = prop_x;
  } else {
    out_x.new_state = x;
  }

  StepOutcome out_y;
  out_y.kernel_tag = KernelTag::kHmc;
  out_y.proposal = prop_y;
  if (grad_y.allFinite() && u < std::exp(std::min(0.0, mala_log_accept(y, prop_y, mean_y)))) {
    out_y.accepted = true;
    out_y.new_state = prop_y;
  } else {
    out_y.new_state = y;
  }
  (void)same;
  return {std::move(out_x), std::move(out_y)};
}

CoupledState coupled_mixture_step(Rng& rng, const CoupledState& state, const TargetModel& target,
                                  const KernelConfig& cfg) {
  CoupledState next;
  next.iteration = state.iteration + 1;

  if (state.met) {
    assert(bitwise_equal(state.x, state.y) && "faithfulness: met chains must stay equal");
    StepOutcome single = mixture_step(rng, state.x, target, cfg);
    next.x = single.new_state;
    next.y = next.x;
    next.met = true;
    return next;
  }

  const double select = rng.uniform();
  if (select < cfg.mixture_weight) {
    auto [ox, oy] = coupled_rwmh_step(rng, state.x, state.y, target, cfg.rwmh_scale);
    next.x = std::move(ox.new_state);
    next.y = std::move(oy.new_state);
  } else {
    auto [ox, oy] = coupled_hmc_step(rng, state.x, state.y, target, cfg);
    next.x = std::move(ox.new_state);
    next.y = std::move(oy.new_state);
  }
  next.met = bitwise_equal(next.x, next.y);
  return next;
}

}  // namespace uhmc
