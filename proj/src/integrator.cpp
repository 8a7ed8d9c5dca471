#include "unbiasedhmc/integrator.hpp"

#include <cmath>
#include <stdexcept>

#include "unbiasedhmc/numeric.hpp"

namespace uhmc {

MassMatrix MassMatrix::identity(int dim) {
  if (dim < 1) throw std::invalid_argument("MassMatrix::identity: dimension must be positive");
  MassMatrix m;
  m.dim_ = dim;
  return m;
}

MassMatrix MassMatrix::dense(const Eigen::MatrixXd& matrix) {
  MassMatrix m;
  m.dim_ = static_cast<int>(matrix.rows());
  auto d = std::make_shared<Dense>();
  d->matrix = matrix;
  d->factor = cholesky_lower(matrix, "mass matrix");
  m.dense_ = std::move(d);
  return m;
}

Eigen::VectorXd MassMatrix::sample_momentum(Rng& rng) const {
  Eigen::VectorXd z = rng.normal_vector(dim_);
  if (is_identity()) return z;
  return dense_->factor.triangularView<Eigen::Lower>() * z;
}

Eigen::VectorXd MassMatrix::apply_inverse(const Eigen::VectorXd& p) const {
  if (is_identity()) return p;
  Eigen::VectorXd w = dense_->factor.triangularView<Eigen::Lower>().solve(p);
  return dense_->factor.transpose().triangularView<Eigen::Upper>().solve(w);
}

double MassMatrix::kinetic(const Eigen::VectorXd& p) const {
  if (is_identity()) return 0.5 * p.squaredNorm();
  return 0.5 * dense_->factor.triangularView<Eigen::Lower>().solve(p).squaredNorm();
}

const Eigen::MatrixXd& MassMatrix::matrix() const {
  if (is_identity()) throw std::logic_error("MassMatrix: identity has no stored matrix");
  return dense_->matrix;
}

const Eigen::MatrixXd& MassMatrix::factor() const {
  if (is_identity()) throw std::logic_error("MassMatrix: identity has no stored factor");
  return dense_->factor;
}

double hamiltonian(const PhasePoint& point, const TargetModel& target, const MassMatrix& mass) {
  return target.potential(point.position) + mass.kinetic(point.momentum);
}

LeapfrogResult leapfrog(const PhasePoint& start, const TargetModel& target, double step_size,
                        int n_steps, const MassMatrix& mass) {
  if (!(step_size > 0.0)) throw std::invalid_argument("leapfrog: step size must be positive");
  if (n_steps < 1) throw std::invalid_argument("leapfrog: need at least one step");

  LeapfrogResult out;
  Eigen::VectorXd q = start.position;
  Eigen::VectorXd p = start.momentum;
  const double half = 0.5 * step_size;

  Eigen::VectorXd grad = target.gradient(q);
  if (!grad.allFinite()) {
    out.point = {std::move(q), std::move(p)};
    out.divergent = true;
    return out;
  }
  for (int step = 0; step < n_steps; ++step) {
    p.noalias() -= half * grad;
    if (mass.is_identity()) {
      q.noalias() += step_size * p;
    } else {
      q.noalias() += step_size * mass.apply_inverse(p);
    }
    if (!q.allFinite()) {
      out.point = {std::move(q), std::move(p)};
      out.divergent = true;
      return out;
    }
    grad = target.gradient(q);
    if (!grad.allFinite()) {
      out.point = {std::move(q), std::move(p)};
      out.divergent = true;
      return out;
    }
    p.noalias() -= half * grad;
  }
  out.point = {std::move(q), std::move(p)};
  out.divergent = !out.point.momentum.allFinite();
  return out;
}

std::pair<double, double> exact_gaussian_flow(double q0, double p0, double t, double mu,
                                              double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("exact_gaussian_flow: sigma must be positive");
  const double c = std::cos(t / sigma);
  const double s = std::sin(t / sigma);
  const double q = mu + (q0 - mu) * c + sigma * p0 * s;
  const double p = p0 * c - (q0 - mu) * s / sigma;
  return {q, p};
}

}  // namespace uhmc
