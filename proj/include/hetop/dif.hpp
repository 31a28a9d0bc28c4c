#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "hetop/errors.hpp"
#include "hetop/estimator.hpp"
#include "hetop/normal.hpp"
#include "hetop/types.hpp"

// DIF decision rules: a group is a candidate for uniform DIF when its latent
// mean leaves the +/-mean_bound band (default 0.255, a 10% probability shift
// at the baseline), and for nonuniform DIF when its discrimination leaves
// [disc_lower, disc_upper] (default +/-10%). When standard errors are
// available a CI rule is combined with the bound rule.

namespace hetop {

// Half-width x0 with |Phi(x0) - Phi(0)| = delta.
inline double solve_mean_bound(double delta) {
  if (!(delta > 0.0 && delta < 0.5))
    throw std::domain_error("probability shift must lie in (0, 0.5)");
  return norm_quantile(0.5 + delta);
}

enum class DifCombineRule { bound_and_ci, bound_or_ci };

struct DifThresholds {
  double mean_bound = 0.255;  // the paper's rounded value; solve_mean_bound(0.10) is exact
  double disc_lower = 0.90;
  double disc_upper = 1.10;
  double alpha = 0.05;
  DifCombineRule combine = DifCombineRule::bound_and_ci;

  void validate() const {
    if (!(mean_bound > 0.0)) throw data_error("mean_bound must be positive");
    if (!(disc_lower < 1.0 && 1.0 < disc_upper))
      throw data_error("discrimination bounds must straddle 1.0");
    if (!(alpha > 0.0 && alpha < 1.0)) throw data_error("alpha must lie in (0, 1)");
  }
};

enum class DifClass { none, uniform, nonuniform, both };

inline const char* to_string(DifClass c) {
  switch (c) {
    case DifClass::none: return "none";
    case DifClass::uniform: return "uniform";
    case DifClass::nonuniform: return "nonuniform";
    case DifClass::both: return "both";
  }
  return "?";
}

struct GroupDifFlags {
  double mu = 0.0;
  double lambda = 1.0;
  bool mean_bound_flag = false;
  bool disc_bound_flag = false;
  std::optional<bool> mean_ci_flag;  // CI for mu excludes 0
  std::optional<bool> disc_ci_flag;  // CI for ln(lambda) excludes 0
  std::optional<double> mu_ci_lo, mu_ci_hi;
  std::optional<double> lambda_ci_lo, lambda_ci_hi;
  bool mean_flag = false;  // combined per the rule
  bool disc_flag = false;
  DifClass classification = DifClass::none;
};

inline DifClass classify(bool mean_flag, bool disc_flag) {
  if (mean_flag && disc_flag) return DifClass::both;
  if (mean_flag) return DifClass::uniform;
  if (disc_flag) return DifClass::nonuniform;
  return DifClass::none;
}

inline GroupDifFlags flag_group(double mu, double lambda, std::optional<double> se_mu,
                                std::optional<double> se_log_lambda, const DifThresholds& t) {
  t.validate();
  if (!(lambda > 0.0)) throw data_error("discrimination must be positive");

  GroupDifFlags flags;
  flags.mu = mu;
  flags.lambda = lambda;
  flags.mean_bound_flag = std::abs(mu) > t.mean_bound;
  flags.disc_bound_flag = lambda > t.disc_upper || lambda < t.disc_lower;

  const double z = norm_quantile(1.0 - t.alpha / 2.0);
  if (se_mu && std::isfinite(*se_mu)) {
    flags.mu_ci_lo = mu - z * *se_mu;
    flags.mu_ci_hi = mu + z * *se_mu;
    flags.mean_ci_flag = (*flags.mu_ci_lo > 0.0) || (*flags.mu_ci_hi < 0.0);
  }
  if (se_log_lambda && std::isfinite(*se_log_lambda)) {
    const double log_lambda = std::log(lambda);
    flags.lambda_ci_lo = std::exp(log_lambda - z * *se_log_lambda);
    flags.lambda_ci_hi = std::exp(log_lambda + z * *se_log_lambda);
    flags.disc_ci_flag = std::abs(log_lambda) > z * *se_log_lambda;
  }

  auto combined = [&](bool bound, std::optional<bool> ci) {
    if (!ci) return bound;  // bound-only when no usable SE
    return t.combine == DifCombineRule::bound_and_ci ? (bound && *ci) : (bound || *ci);
  };
  flags.mean_flag = combined(flags.mean_bound_flag, flags.mean_ci_flag);
  flags.disc_flag = combined(flags.disc_bound_flag, flags.disc_ci_flag);
  flags.classification = classify(flags.mean_flag, flags.disc_flag);
  return flags;
}

struct DifReport {
  std::vector<std::string> group_labels;
  std::vector<GroupDifFlags> groups;
  DifThresholds thresholds;
};

inline DifReport dif_report(const FitResult& fit, const std::vector<std::string>& labels,
                            const DifThresholds& t = {}) {
  DifReport report;
  report.group_labels = labels;
  report.thresholds = t;
  const Eigen::Index g_count = fit.params.n_groups();
  for (Eigen::Index g = 0; g < g_count; ++g) {
    std::optional<double> se_mu, se_ll;
    if (fit.standard_errors) {
      se_mu = fit.standard_errors->mu[g];
      se_ll = fit.standard_errors->log_lambda[g];
    }
    report.groups.push_back(flag_group(fit.params.mu[g], fit.params.lambda(g), se_mu, se_ll, t));
  }
  return report;
}

// Per-nu reports plus, per group, the fraction of grid points at which each
// flag is raised. Non-converged path entries still contribute their
// estimates; judging stability across nu is the analyst's job.
struct PathDifSeries {
  Eigen::VectorXd nu_grid;
  std::vector<DifReport> reports;            // one per nu
  Eigen::VectorXd mean_flag_fraction;        // per group
  Eigen::VectorXd disc_flag_fraction;        // per group
};

inline PathDifSeries dif_along_path(const PathResult& path, const std::vector<std::string>& labels,
                                    const DifThresholds& t = {}) {
  if (path.fits.empty()) throw data_error("empty path");
  PathDifSeries series;
  series.nu_grid = path.nu_grid;
  const Eigen::Index g_count = path.fits.front().params.n_groups();
  series.mean_flag_fraction = Eigen::VectorXd::Zero(g_count);
  series.disc_flag_fraction = Eigen::VectorXd::Zero(g_count);

  for (const FitResult& fit : path.fits) {
    series.reports.push_back(dif_report(fit, labels, t));
    const DifReport& report = series.reports.back();
    for (Eigen::Index g = 0; g < g_count; ++g) {
      if (report.groups[g].mean_flag) series.mean_flag_fraction[g] += 1.0;
      if (report.groups[g].disc_flag) series.disc_flag_fraction[g] += 1.0;
    }
  }
  series.mean_flag_fraction /= static_cast<double>(path.fits.size());
  series.disc_flag_fraction /= static_cast<double>(path.fits.size());
  return series;
}

}  // namespace hetop
