#include "unbiasedhmc/targets.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "unbiasedhmc/numeric.hpp"

namespace uhmc {

namespace {

// shared state for Gaussian potentials: mean and the Cholesky factor of Sigma
struct GaussianCore {
  Eigen::VectorXd mean;
  Eigen::MatrixXd factor;  // L, L L^T = Sigma

  Eigen::VectorXd whiten(const Eigen::VectorXd& q) const {
    return factor.triangularView<Eigen::Lower>().solve(q - mean);
  }
  // Sigma^{-1} (q - mean)
  Eigen::VectorXd precision_apply(const Eigen::VectorXd& q) const {
    Eigen::VectorXd w = whiten(q);
    return factor.transpose().triangularView<Eigen::Upper>().solve(w);
  }
};

}  // namespace

TargetModel gaussian_target(const Eigen::VectorXd& mean, const CovarianceSpec& covariance) {
  const int d = static_cast<int>(mean.size());
  if (d < 1) throw std::invalid_argument("gaussian_target: dimension must be positive");

  TargetModel model;
  model.dim = d;
  model.name = "gaussian";

  Eigen::VectorXd variances(d);
  if (const auto* iso = std::get_if<IsotropicCovariance>(&covariance)) {
    if (!(iso->variance > 0.0)) {
      throw std::invalid_argument("gaussian_target: not positive definite, pivot 0 = " +
                                  std::to_string(iso->variance));
    }
    const double inv_var = 1.0 / iso->variance;
    Eigen::VectorXd mu = mean;
    model.potential = [mu, inv_var](const Eigen::VectorXd& q) {
      return 0.5 * inv_var * (q - mu).squaredNorm();
    };
    model.gradient = [mu, inv_var](const Eigen::VectorXd& q) {
      return Eigen::VectorXd(inv_var * (q - mu));
    };
    variances.setConstant(iso->variance);
  } else {
    const Eigen::MatrixXd& sigma = std::get<Eigen::MatrixXd>(covariance);
    if (sigma.rows() != d || sigma.cols() != d) {
      throw std::invalid_argument("gaussian_target: covariance dimension mismatch");
    }
    auto core = std::make_shared<GaussianCore>();
    core->mean = mean;
    core->factor = cholesky_lower(sigma, "gaussian_target covariance");
    model.potential = [core](const Eigen::VectorXd& q) {
      return 0.5 * core->whiten(q).squaredNorm();
    };
    model.gradient = [core](const Eigen::VectorXd& q) { return core->precision_apply(q); };
    variances = sigma.diagonal();
  }

  AnalyticMoments moments;
  moments.mean = mean;
  moments.second_moment = variances + mean.cwiseProduct(mean);
  model.analytic_moments = moments;
  return model;
}

TargetModel standard_gaussian_target(int dim) {
  return gaussian_target(Eigen::VectorXd::Zero(dim), IsotropicCovariance{1.0});
}

TargetModel rosenbrock_target() {
  TargetModel model;
  model.dim = 2;
  model.name = "rosenbrock";
  model.potential = [](const Eigen::VectorXd& q) {
    const double a = 1.0 - q[0];
    const double b = q[1] - q[0] * q[0];
    return a * a + 10.0 * b * b;
  };
  model.gradient = [](const Eigen::VectorXd& q) {
    const double b = q[1] - q[0] * q[0];
    Eigen::VectorXd g(2);
    g[0] = -2.0 * (1.0 - q[0]) - 40.0 * q[0] * b;
    g[1] = 20.0 * b;
    return g;
  };
  return model;
}

// ---------------------------------------------------------------------------
// logistic regression

namespace {

struct FixedLogisticCore {
  Eigen::MatrixXd design;
  Eigen::VectorXd responses;
  double zeta;
  Eigen::MatrixXd prior_factor;  // chol(Sigma)
  Eigen::VectorXd xty;           // X^T y

  // Sigma^{-1} q
  Eigen::VectorXd precision_apply(const Eigen::VectorXd& q) const {
    Eigen::VectorXd w = prior_factor.triangularView<Eigen::Lower>().solve(q);
    return prior_factor.transpose().triangularView<Eigen::Upper>().solve(w);
  }
};

struct HierarchicalLogisticCore {
  Eigen::MatrixXd design;    // N x p
  Eigen::VectorXd responses;
  double exp_rate;

  // state q = (a, b, z) with z = log s^2
  double potential(const Eigen::VectorXd& q) const {
    const Eigen::Index p = design.cols();
    const double a = q[0];
    const auto b = q.segment(1, p);
    const double z = q[p + 1];
    Eigen::VectorXd eta = (design * b).array() + a;
    double nll = 0.0;
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
      // log(1 + exp(eta)) - y*eta, stable in both tails
      nll += softplus_neg(eta[i]) + (1.0 - responses[i]) * eta[i];
    }
    const double ssq = a * a + b.squaredNorm();
    const double half_coords = 0.5 * static_cast<double>(p + 1);
    // exp-Jacobian of s2 = e^z contributes -z
    return nll + 0.5 * std::exp(-z) * ssq + (half_coords - 1.0) * z + exp_rate * std::exp(z);
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd& q) const {
    const Eigen::Index p = design.cols();
    const double a = q[0];
    const auto b = q.segment(1, p);
    const double z = q[p + 1];
    Eigen::VectorXd eta = (design * b).array() + a;
    Eigen::VectorXd resid(eta.size());
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
      resid[i] = logistic_sigmoid(eta[i]) - responses[i];
    }
    const double inv_s2 = std::exp(-z);
    Eigen::VectorXd g(q.size());
    g[0] = resid.sum() + a * inv_s2;
    g.segment(1, p) = design.transpose() * resid + b * inv_s2;
    const double ssq = a * a + b.squaredNorm();
    const double half_coords = 0.5 * static_cast<double>(p + 1);
    g[p + 1] = -0.5 * inv_s2 * ssq + (half_coords - 1.0) + exp_rate * std::exp(z);
    return g;
  }
};

}  // namespace

TargetModel logistic_target(const LogisticModelSpec& spec) {
  const Eigen::Index n_obs = spec.design.rows();
  const Eigen::Index p = spec.design.cols();
  if (spec.responses.size() != n_obs) {
    throw std::invalid_argument("logistic_target: design has " + std::to_string(n_obs) +
                                " rows but responses has " + std::to_string(spec.responses.size()));
  }

  TargetModel model;
  if (const auto* fixed = std::get_if<FixedGaussianPrior>(&spec.prior)) {
    if (fixed->covariance.rows() != p || fixed->covariance.cols() != p) {
      throw std::invalid_argument("logistic_target: prior covariance must be " +
                                  std::to_string(p) + "x" + std::to_string(p));
    }
    auto core = std::make_shared<FixedLogisticCore>();
    core->design = spec.design;
    core->responses = spec.responses;
    core->zeta = fixed->shrinkage;
    core->prior_factor = cholesky_lower(fixed->covariance, "logistic prior covariance");
    core->xty = spec.design.transpose() * spec.responses;

    model.dim = static_cast<int>(p);
    model.name = "logistic_fixed";
    // U(q) = zeta/2 q' Sigma^{-1} q + y'Xq + sum_n log(1 + exp(-x_n'q))
    model.potential = [core](const Eigen::VectorXd& q) {
      Eigen::VectorXd w = core->prior_factor.triangularView<Eigen::Lower>().solve(q);
      Eigen::VectorXd eta = core->design * q;
      double lik = 0.0;
      for (Eigen::Index i = 0; i < eta.size(); ++i) lik += softplus_neg(eta[i]);
      return 0.5 * core->zeta * w.squaredNorm() + core->xty.dot(q) + lik;
    };
    model.gradient = [core](const Eigen::VectorXd& q) {
      Eigen::VectorXd eta = core->design * q;
      Eigen::VectorXd s(eta.size());
      for (Eigen::Index i = 0; i < eta.size(); ++i) s[i] = logistic_sigmoid(-eta[i]);
      Eigen::VectorXd g = core->zeta * core->precision_apply(q) + core->xty;
      g.noalias() -= core->design.transpose() * s;
      return g;
    };
  } else {
    auto core = std::make_shared<HierarchicalLogisticCore>();
    core->design = spec.design;
    core->responses = spec.responses;
    core->exp_rate = std::get<HierarchicalPrior>(spec.prior).exp_rate;

    model.dim = static_cast<int>(p) + 2;
    model.name = "logistic_hierarchical";
    model.potential = [core](const Eigen::VectorXd& q) { return core->potential(q); };
    model.gradient = [core](const Eigen::VectorXd& q) { return core->gradient(q); };
  }
  return model;
}

// ---------------------------------------------------------------------------
// log-Gaussian Cox process

Eigen::MatrixXd build_cox_covariance(int n, double signal_variance, double length_scale) {
  if (n < 1) throw std::invalid_argument("build_cox_covariance: n must be >= 1");
  const int d = n * n;
  const double inv_nb = 1.0 / (static_cast<double>(n) * length_scale);
  Eigen::MatrixXd sigma(d, d);
  for (int r1 = 0; r1 < n; ++r1) {
    for (int c1 = 0; c1 < n; ++c1) {
      const int i = r1 * n + c1;
      for (int r2 = 0; r2 < n; ++r2) {
        for (int c2 = 0; c2 < n; ++c2) {
          const int j = r2 * n + c2;
          const double dr = static_cast<double>(r1 - r2);
          const double dc = static_cast<double>(c1 - c2);
          sigma(i, j) = signal_variance * std::exp(-std::sqrt(dr * dr + dc * dc) * inv_nb);
        }
      }
    }
  }
  return sigma;
}

CoxModelSpec make_cox_spec(int n, double signal_variance, double length_scale, double mean,
                           const Eigen::VectorXd& counts) {
  if (counts.size() != static_cast<Eigen::Index>(n) * n) {
    throw std::invalid_argument("make_cox_spec: counts must have length n^2 = " +
                                std::to_string(n * n));
  }
  CoxModelSpec spec;
  spec.grid_side = n;
  spec.signal_variance = signal_variance;
  spec.length_scale = length_scale;
  spec.mean = mean;
  spec.cell_area = 1.0 / (static_cast<double>(n) * n);
  spec.counts = counts;
  spec.covariance_factor =
      cholesky_lower(build_cox_covariance(n, signal_variance, length_scale), "cox covariance");
  return spec;
}

namespace {

struct CoxCore {
  Eigen::MatrixXd factor;
  Eigen::VectorXd counts;
  double mean;
  double cell_area;

  Eigen::VectorXd precision_apply(const Eigen::VectorXd& centered) const {
    Eigen::VectorXd w = factor.triangularView<Eigen::Lower>().solve(centered);
    return factor.transpose().triangularView<Eigen::Upper>().solve(w);
  }
};

}  // namespace

TargetModel cox_target(const CoxModelSpec& spec) {
  const Eigen::Index d = spec.counts.size();
  if (spec.covariance_factor.rows() != d) {
    throw std::invalid_argument("cox_target: covariance factor does not match counts length");
  }
  auto core = std::make_shared<CoxCore>();
  core->factor = spec.covariance_factor;
  core->counts = spec.counts;
  core->mean = spec.mean;
  core->cell_area = spec.cell_area;

  TargetModel model;
  model.dim = static_cast<int>(d);
  model.name = "cox";
  model.potential = [core](const Eigen::VectorXd& x) {
    Eigen::VectorXd centered = x.array() - core->mean;
    Eigen::VectorXd w = core->factor.triangularView<Eigen::Lower>().solve(centered);
    const double prior = 0.5 * w.squaredNorm();
    const double lik = core->cell_area * x.array().exp().sum() - core->counts.dot(x);
    return prior + lik;
  };
  model.gradient = [core](const Eigen::VectorXd& x) {
    Eigen::VectorXd centered = x.array() - core->mean;
    Eigen::VectorXd g = core->precision_apply(centered);
    g.array() += core->cell_area * x.array().exp();
    g -= core->counts;
    return g;
  };
  return model;
}

Eigen::MatrixXd cox_metric(const CoxModelSpec& spec) {
  const Eigen::Index d = spec.counts.size();
  // Sigma^{-1} from the stored factor
  Eigen::MatrixXd inv_factor = spec.covariance_factor.triangularView<Eigen::Lower>().solve(
      Eigen::MatrixXd::Identity(d, d));
  Eigen::MatrixXd metric = inv_factor.transpose() * inv_factor;
  const double ridge = spec.cell_area * std::exp(spec.mean + spec.signal_variance / 2.0);
  metric.diagonal().array() += ridge;
  return metric;
}

// ---------------------------------------------------------------------------
// dataset ingestion

namespace {

std::vector<std::vector<double>> parse_numeric_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open data file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    for (auto& c : line) {
      if (c == ',' || c == ';' || c == '\t') c = ' ';
    }
    std::istringstream ss(line);
    std::vector<double> row;
    std::string tok;
    while (ss >> tok) {
      try {
        std::size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        row.push_back(v);
      } catch (const std::exception&) {
        throw std::runtime_error(path + ": row " + std::to_string(line_no) +
                                 ": malformed field '" + tok + "'");
      }
    }
    if (row.empty()) continue;  // blank line
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::runtime_error(path + ": row " + std::to_string(line_no) + ": expected " +
                               std::to_string(rows.front().size()) + " fields, found " +
                               std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error(path + ": no data rows");
  return rows;
}

}  // namespace

LogisticModelSpec load_german_credit(const std::string& path,
                                     std::variant<FixedGaussianPrior, HierarchicalPrior> prior) {
  const auto rows = parse_numeric_rows(path);
  const std::size_t n_obs = rows.size();
  const std::size_t n_cols = rows.front().size();
  if (n_cols < 2) throw std::runtime_error(path + ": need at least one covariate and a response");
  const std::size_t c = n_cols - 1;  // raw covariates
  const std::size_t expanded = c + c * (c - 1) / 2;

  Eigen::MatrixXd raw(n_obs, c);
  Eigen::VectorXd y(n_obs);
  for (std::size_t i = 0; i < n_obs; ++i) {
    for (std::size_t j = 0; j < c; ++j) raw(i, j) = rows[i][j];
    const double resp = rows[i][c];
    if (resp != 0.0 && resp != 1.0) {
      throw std::runtime_error(path + ": row " + std::to_string(i + 1) +
                               ": response must be 0 or 1, found " + std::to_string(resp));
    }
    y[i] = resp;
  }

  // original columns first, then interactions (i<j) in lexicographic order
  Eigen::MatrixXd design(n_obs, expanded);
  design.leftCols(c) = raw;
  std::size_t col = c;
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t j = i + 1; j < c; ++j) {
      design.col(col++) = raw.col(i).cwiseProduct(raw.col(j));
    }
  }

  // standardize every column to sample mean 0, sample sd 1
  const double n = static_cast<double>(n_obs);
  for (Eigen::Index j = 0; j < design.cols(); ++j) {
    const double mean = design.col(j).mean();
    design.col(j).array() -= mean;
    const double sd = std::sqrt(design.col(j).squaredNorm() / (n - 1.0));
    if (!(sd > 0.0)) {
      throw std::runtime_error(path + ": column " + std::to_string(j + 1) +
                               " of the expanded design is constant and cannot be standardized");
    }
    design.col(j) /= sd;
  }

  LogisticModelSpec spec;
  spec.design = std::move(design);
  spec.responses = std::move(y);
  spec.prior = std::move(prior);
  return spec;
}

Eigen::VectorXd load_pines_counts(const std::string& path, int n) {
  if (n < 1) throw std::invalid_argument("load_pines: n must be >= 1");
  const auto rows = parse_numeric_rows(path);
  if (rows.front().size() != 2) {
    throw std::runtime_error(path + ": expected two coordinate columns, found " +
                             std::to_string(rows.front().size()));
  }
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n) * n);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double u = rows[i][0];
    const double v = rows[i][1];
    if (!(u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0)) {
      throw std::runtime_error(path + ": row " + std::to_string(i + 1) +
                               ": coordinates outside [0,1]^2");
    }
    const int r = std::min(static_cast<int>(u * n), n - 1);
    const int col = std::min(static_cast<int>(v * n), n - 1);
    counts[static_cast<Eigen::Index>(r) * n + col] += 1.0;
  }
  return counts;
}

CoxModelSpec load_pines(const std::string& path, int n, double signal_variance,
                        double length_scale) {
  Eigen::VectorXd counts = load_pines_counts(path, n);
  const double total = counts.sum();
  const double mu = std::log(total) - signal_variance / 2.0;
  return make_cox_spec(n, signal_variance, length_scale, mu, counts);
}

}  // namespace uhmc
