#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "hetop/bfgs.hpp"
#include "hetop/errors.hpp"
#include "hetop/likelihood.hpp"
#include "hetop/normal.hpp"
#include "hetop/parameterization.hpp"
#include "hetop/penalty.hpp"
#include "hetop/types.hpp"

namespace hetop {

// Whether the pairwise penalty on the discriminations acts on lambda* itself
// or on ln(lambda*) = -gamma. The lambda scale is the default.
enum class LambdaPenaltyScale { lambda, log_lambda };

enum class Initialization { probit_moments, zeros, warm_start };

struct FitConfig {
  IdentificationScheme identification;
  PenaltySpec penalty;
  int max_iterations = 500;
  // Relative: converged when ||grad||_2 <= tol * max(1, |objective|).
  double gradient_tolerance = 1e-8;
  Initialization initialization = Initialization::probit_moments;
  GroupParams warm_start;  // used when initialization == warm_start
  LambdaPenaltyScale lambda_scale = LambdaPenaltyScale::lambda;

  void validate() const {
    penalty.validate();
    if (max_iterations < 1) throw data_error("max_iterations must be >= 1");
    if (!(gradient_tolerance > 0.0)) throw data_error("gradient_tolerance must be positive");
  }
};

struct PathResult {
  Eigen::VectorXd nu_grid;        // ascending
  std::vector<FitResult> fits;    // aligned 1:1 with nu_grid

  Eigen::VectorXd penalty_proportions() const {
    Eigen::VectorXd out(static_cast<Eigen::Index>(fits.size()));
    for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = fits[i].penalty_proportion;
    return out;
  }
};

namespace detail {

// Least-squares line tau_k = mu + sigma * PhiInv(cum_k) through the interior
// cumulative proportions of one group. Used both for starting values and as
// the method-of-moments oracle.
struct ProbitLine {
  double mu = 0.0;
  double sigma = 1.0;
  bool ok = false;
};

inline ProbitLine probit_line_fit(const Eigen::VectorXd& cumulative,
                                  const Eigen::VectorXd& thresholds) {
  std::vector<double> xs, ys;
  for (Eigen::Index k = 0; k < thresholds.size(); ++k) {
    const double c = cumulative[k];
    if (c > 0.0 && c < 1.0) {
      xs.push_back(norm_quantile(c));
      ys.push_back(thresholds[k]);
    }
  }
  ProbitLine line;
  if (xs.size() < 2) return line;

  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i]; sy += ys[i];
    sxx += xs[i] * xs[i]; sxy += xs[i] * ys[i];
  }
  const double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-12) return line;
  const double slope = (n * sxy - sx * sy) / denom;
  if (!(slope > 0.0) || !std::isfinite(slope)) return line;
  line.sigma = slope;
  line.mu = (sy - slope * sx) / n;
  line.ok = std::isfinite(line.mu);
  return line;
}

// Interior cumulative proportions Pr(Y <= k-1) for k = 1..K of one count row.
inline Eigen::VectorXd cumulative_proportions(const Eigen::VectorXd& row) {
  const Eigen::Index k_count = row.size() - 1;
  const double total = row.sum();
  Eigen::VectorXd cum(k_count);
  double running = 0.0;
  for (Eigen::Index k = 0; k < k_count; ++k) {
    running += row[k];
    cum[k] = running / total;
  }
  return cum;
}

}  // namespace detail

// Probit method-of-moments starting values: thresholds from pooled cumulative
// proportions, per-group (mu, gamma) from the probit line, then the whole
// parameter set is mapped by the probability-preserving transform
// (mu, tau, sigma) -> ((mu-c)/s, (tau-c)/s, sigma/s) onto the identification
// constraints. Degenerate groups fall back to mu = 0, gamma = 0.
inline GroupParams initial_params(const CategoryCountTable& table,
                                  const IdentificationScheme& scheme = {}) {
  table.validate();
  scheme.validate(table.n_groups());
  const Eigen::Index g_count = table.n_groups();
  const Eigen::Index k_count = table.n_thresholds();

  // Pooled thresholds. Clamp away 0/1 and enforce a minimal increment so a
  // globally empty category cannot produce ties.
  const Eigen::VectorXd pooled = table.counts.colwise().sum();
  const double pooled_total = pooled.sum();
  GroupParams params;
  params.thresholds.resize(k_count);
  double running = 0.0, previous = -std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < k_count; ++k) {
    running += pooled[k];
    const double c = std::min(std::max(running / pooled_total, 1e-10), 1.0 - 1e-10);
    double t = norm_quantile(c);
    if (t <= previous + 1e-6) t = previous + 1e-6;
    params.thresholds[k] = t;
    previous = t;
  }

  params.mu = Eigen::VectorXd::Zero(g_count);
  params.log_scale = Eigen::VectorXd::Zero(g_count);
  for (Eigen::Index g = 0; g < g_count; ++g) {
    const auto line = detail::probit_line_fit(
        detail::cumulative_proportions(table.counts.row(g)), params.thresholds);
    if (line.ok) {
      params.mu[g] = line.mu;
      params.log_scale[g] = std::log(line.sigma);
    }
  }

  double center, log_spread;
  if (scheme.kind == IdentificationScheme::Kind::sum_to_zero) {
    center = params.mu.mean();
    log_spread = params.log_scale.mean();
  } else {
    center = params.mu[scheme.reference];
    log_spread = params.log_scale[scheme.reference];
  }
  const double s = std::exp(log_spread);
  params.mu = (params.mu.array() - center) / s;
  params.thresholds = (params.thresholds.array() - center) / s;
  params.log_scale.array() -= log_spread;
  // Pin the constrained entries exactly.
  if (scheme.kind == IdentificationScheme::Kind::sum_to_zero) {
    params.mu.array() -= params.mu.mean();
    params.log_scale.array() -= params.log_scale.mean();
  } else {
    params.mu[scheme.reference] = 0.0;
    params.log_scale[scheme.reference] = 0.0;
  }
  return params;
}

struct ObjectiveParts {
  double loglik = 0.0;
  double penalty_mu = 0.0;
  double penalty_lambda = 0.0;
  double value = 0.0;  // loglik - penalty_mu - penalty_lambda
};

// Value and gradient (with respect to the free vector) of the penalized
// log-likelihood, maximization convention.
inline ObjectiveParts penalized_loglik(const CategoryCountTable& table,
                                       const FreeParameterVector& v,
                                       const IdentificationScheme& scheme,
                                       const PenaltySpec& penalty,
                                       LambdaPenaltyScale lambda_scale,
                                       FreeParameterVector* gradient = nullptr) {
  const GroupParams params = unpack(v, scheme, table.n_groups(), table.n_thresholds());

  ObjectiveParts parts;
  Eigen::VectorXd d_mu, d_gamma, d_tau;
  if (gradient) {
    const auto nat = detail::loglik_natural_gradient(table, params);
    parts.loglik = nat.value;
    d_mu = nat.d_mu;
    d_gamma = nat.d_gamma;
    d_tau = nat.d_tau;
  } else {
    parts.loglik = grouped_loglik(table, params);
  }

  parts.penalty_mu = total_penalty(params.mu, penalty).value;
  const Eigen::VectorXd lambdas = params.lambdas();
  const Eigen::VectorXd scale_values =
      lambda_scale == LambdaPenaltyScale::lambda
          ? lambdas
          : Eigen::VectorXd(-params.log_scale);
  parts.penalty_lambda = total_penalty(scale_values, penalty).value;
  parts.value = parts.loglik - parts.penalty_mu - parts.penalty_lambda;

  if (gradient) {
    d_mu -= penalty_gradient(params.mu, penalty);
    const Eigen::VectorXd d_scale = penalty_gradient(scale_values, penalty);
    if (lambda_scale == LambdaPenaltyScale::lambda) {
      // d lambda / d gamma = -lambda
      d_gamma.array() += d_scale.array() * lambdas.array();
    } else {
      // d(-gamma)/d gamma = -1
      d_gamma += d_scale;
    }
    *gradient = chain_to_free(d_mu, d_gamma, d_tau, params, scheme);
  }
  return parts;
}

// Maximize the penalized grouped likelihood. Hitting the iteration cap or a
// line-search stall reports converged = false rather than throwing; a
// non-finite objective at the starting point throws initialization_error.
inline FitResult fit(const CategoryCountTable& table, const FitConfig& config) {
  table.validate();
  config.validate();
  config.identification.validate(table.n_groups());

  GroupParams start;
  switch (config.initialization) {
    case Initialization::probit_moments:
      start = initial_params(table, config.identification);
      break;
    case Initialization::zeros:
      start = initial_params(table, config.identification);
      start.mu.setZero();
      start.log_scale.setZero();
      break;
    case Initialization::warm_start:
      start = config.warm_start;
      start.validate();
      break;
  }

  const FreeParameterVector v0 = pack(start, config.identification);
  auto objective = [&](const Eigen::VectorXd& v, Eigen::VectorXd& grad) {
    FreeParameterVector g;
    const ObjectiveParts parts = penalized_loglik(table, v, config.identification,
                                                  config.penalty, config.lambda_scale, &g);
    grad = -g;
    return -parts.value;
  };

  {
    Eigen::VectorXd g0(v0.size());
    if (!std::isfinite(objective(v0, g0)))
      throw initialization_error("penalized objective is not finite at the starting point");
  }

  BfgsOptions opts;
  opts.max_iterations = config.max_iterations;
  opts.gradient_tolerance = config.gradient_tolerance;
  const BfgsResult opt = bfgs_minimize(objective, v0, opts);

  FitResult result;
  result.params = unpack(opt.x, config.identification, table.n_groups(), table.n_thresholds());
  const ObjectiveParts parts = penalized_loglik(table, opt.x, config.identification,
                                                config.penalty, config.lambda_scale);
  result.loglik = parts.loglik;
  result.constant_c = multinomial_constant(table);
  result.penalty_mu = parts.penalty_mu;
  result.penalty_lambda = parts.penalty_lambda;
  result.penalized_objective = parts.value;
  result.penalty_proportion = penalty_proportion(parts.loglik, parts.penalty_mu, parts.penalty_lambda);
  result.converged = opt.converged;
  result.iterations = opt.iterations;
  result.gradient_norm = opt.grad_norm;
  return result;
}

// Fit a descending sweep over nu (weakest penalty first), warm-starting each
// fit from the previous solution. Results are returned aligned with the
// ascending nu_grid. Per-nu failures are recorded in the entry; the path
// continues.
inline PathResult fit_path(const CategoryCountTable& table, const FitConfig& config,
                           const Eigen::VectorXd& nu_grid) {
  if (nu_grid.size() == 0) throw data_error("nu grid is empty");
  for (Eigen::Index i = 0; i < nu_grid.size(); ++i) {
    if (!(nu_grid[i] > 0.0)) throw data_error("nu grid values must be positive");
    if (i > 0 && !(nu_grid[i] > nu_grid[i - 1]))
      throw data_error("nu grid must be strictly increasing");
  }

  PathResult path;
  path.nu_grid = nu_grid;
  path.fits.resize(static_cast<std::size_t>(nu_grid.size()));

  FitConfig step = config;
  bool have_warm = false;
  for (Eigen::Index i = nu_grid.size() - 1; i >= 0; --i) {
    step.penalty.nu = nu_grid[i];
    step.initialization = have_warm ? Initialization::warm_start : config.initialization;
    try {
      path.fits[i] = fit(table, step);
    } catch (const initialization_error&) {
      // Retry cold before recording the failure.
      FitConfig cold = step;
      cold.initialization = config.initialization == Initialization::warm_start
                                ? Initialization::probit_moments
                                : config.initialization;
      try {
        path.fits[i] = fit(table, cold);
      } catch (const initialization_error&) {
        FitResult failed;
        failed.params = have_warm ? step.warm_start : initial_params(table, config.identification);
        failed.loglik = std::numeric_limits<double>::quiet_NaN();
        failed.penalized_objective = std::numeric_limits<double>::quiet_NaN();
        failed.penalty_proportion = std::numeric_limits<double>::quiet_NaN();
        failed.converged = false;
        path.fits[i] = failed;
        continue;
      }
    }
    step.warm_start = path.fits[i].params;
    have_warm = true;
  }
  return path;
}

// Delta-method standard errors from a central finite-difference Hessian of
// the penalized objective at the optimum (differences of the analytic
// gradient, step 1e-5 scaled per coordinate). Parameters whose variance
// comes out unusable are flagged with NaN.
inline StandardErrors standard_errors(const CategoryCountTable& table, const FitResult& fit_result,
                                      const FitConfig& config) {
  if (!fit_result.converged)
    throw precondition_error("standard errors require a converged fit");

  const Eigen::Index g_count = table.n_groups();
  const Eigen::Index k_count = table.n_thresholds();
  const FreeParameterVector v = pack(fit_result.params, config.identification);
  const Eigen::Index n = v.size();

  auto gradient_at = [&](const Eigen::VectorXd& point) {
    FreeParameterVector g;
    penalized_loglik(table, point, config.identification, config.penalty, config.lambda_scale, &g);
    return g;
  };

  Eigen::MatrixXd hessian(n, n);
  Eigen::VectorXd probe = v;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double h = 1e-5 * std::max(1.0, std::abs(v[j]));
    probe[j] = v[j] + h;
    const Eigen::VectorXd g_plus = gradient_at(probe);
    probe[j] = v[j] - h;
    const Eigen::VectorXd g_minus = gradient_at(probe);
    probe[j] = v[j];
    hessian.col(j) = (g_plus - g_minus) / (2.0 * h);
  }
  hessian = 0.5 * (hessian + hessian.transpose()).eval();

  StandardErrors se;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  se.mu = Eigen::VectorXd::Constant(g_count, nan);
  se.log_lambda = Eigen::VectorXd::Constant(g_count, nan);
  se.thresholds = Eigen::VectorXd::Constant(k_count, nan);

  // Covariance of the free vector is (-H)^{-1}; H is the Hessian of the
  // maximized objective, so -H should be positive definite.
  Eigen::LDLT<Eigen::MatrixXd> solver(-hessian);
  if (solver.info() != Eigen::Success || !solver.isPositive()) {
    se.hessian_ok = false;
    return se;
  }
  const Eigen::MatrixXd cov_free = solver.solve(Eigen::MatrixXd::Identity(n, n));
  const Eigen::MatrixXd jac = natural_jacobian(fit_result.params, config.identification);
  const Eigen::MatrixXd cov_nat = jac * cov_free * jac.transpose();

  auto sqrt_or_nan = [&](double variance) {
    return (std::isfinite(variance) && variance >= 0.0) ? std::sqrt(variance) : nan;
  };
  for (Eigen::Index g = 0; g < g_count; ++g) {
    se.mu[g] = sqrt_or_nan(cov_nat(g, g));
    // ln lambda = -gamma: identical standard error.
    se.log_lambda[g] = sqrt_or_nan(cov_nat(g_count + g, g_count + g));
  }
  for (Eigen::Index k = 0; k < k_count; ++k)
    se.thresholds[k] = sqrt_or_nan(cov_nat(2 * g_count + k, 2 * g_count + k));
  se.hessian_ok = se.mu.allFinite() && se.log_lambda.allFinite() && se.thresholds.allFinite();
  return se;
}

}  // namespace hetop
