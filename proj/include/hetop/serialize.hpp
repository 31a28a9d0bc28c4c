#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "hetop/csv.hpp"
#include "hetop/dif.hpp"
#include "hetop/errors.hpp"
#include "hetop/estimator.hpp"
#include "hetop/icc.hpp"
#include "hetop/manifest.hpp"
#include "hetop/types.hpp"

// JSON/CSV serialization of fit results, penalty paths, DIF reports and ICC
// curves. Emission uses insertion-ordered JSON and shortest-round-trip
// doubles, so identical inputs always produce identical bytes.

namespace hetop {

using ordered_json = nlohmann::ordered_json;

namespace detail {

inline ordered_json vector_to_json(const Eigen::VectorXd& v) {
  ordered_json arr = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    arr.push_back(std::isfinite(v[i]) ? ordered_json(v[i]) : ordered_json(nullptr));
  return arr;
}

inline Eigen::VectorXd vector_from_json(const nlohmann::json& arr) {
  Eigen::VectorXd v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i)
    v[static_cast<Eigen::Index>(i)] =
        arr[i].is_null() ? std::numeric_limits<double>::quiet_NaN() : arr[i].get<double>();
  return v;
}

inline ordered_json finite_or_null(double x) {
  return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr);
}

}  // namespace detail

inline std::string identification_string(const IdentificationScheme& scheme,
                                         const std::vector<std::string>& labels) {
  if (scheme.kind == IdentificationScheme::Kind::sum_to_zero) return "sum-to-zero";
  return "reference:" + labels.at(static_cast<std::size_t>(scheme.reference));
}

inline PenaltyKind penalty_kind_from_string(const std::string& name) {
  if (name == "ridge") return PenaltyKind::ridge;
  if (name == "lasso") return PenaltyKind::lasso;
  if (name == "alignment") return PenaltyKind::alignment;
  throw data_error("unknown penalty kind '" + name + "'");
}

inline ordered_json fit_to_json(const FitResult& fit, const std::vector<std::string>& labels,
                                const FitConfig& config, const RunManifest& manifest) {
  ordered_json j;
  j["group_labels"] = labels;
  j["mu"] = detail::vector_to_json(fit.params.mu);
  j["lambda"] = detail::vector_to_json(fit.params.lambdas());
  j["sigma"] = detail::vector_to_json(fit.params.log_scale.array().exp());
  j["thresholds"] = detail::vector_to_json(fit.params.thresholds);
  j["loglik"] = detail::finite_or_null(fit.loglik);
  j["constant_c"] = detail::finite_or_null(fit.constant_c);
  j["penalty_mu"] = detail::finite_or_null(fit.penalty_mu);
  j["penalty_lambda"] = detail::finite_or_null(fit.penalty_lambda);
  j["penalty_proportion"] = detail::finite_or_null(fit.penalty_proportion);
  j["nu"] = config.penalty.nu;
  j["penalty_kind"] = to_string(config.penalty.kind);
  j["epsilon"] = config.penalty.epsilon;
  j["identification"] = identification_string(config.identification, labels);
  j["converged"] = fit.converged;
  j["iterations"] = fit.iterations;
  if (fit.standard_errors) {
    ordered_json se;
    se["mu"] = detail::vector_to_json(fit.standard_errors->mu);
    se["log_lambda"] = detail::vector_to_json(fit.standard_errors->log_lambda);
    se["thresholds"] = detail::vector_to_json(fit.standard_errors->thresholds);
    se["hessian_ok"] = fit.standard_errors->hessian_ok;
    j["standard_errors"] = se;
  }
  j["manifest"] = manifest.to_json();
  return j;
}

// The slice of a fit JSON document needed by downstream commands.
struct LoadedFit {
  std::vector<std::string> group_labels;
  GroupParams params;
  FitResult fit;
  double nu = 1.0;
  std::string penalty_kind;
  std::string identification;
};

inline LoadedFit fit_from_json(const nlohmann::json& j) {
  LoadedFit loaded;
  loaded.group_labels = j.at("group_labels").get<std::vector<std::string>>();
  loaded.params.mu = detail::vector_from_json(j.at("mu"));
  loaded.params.thresholds = detail::vector_from_json(j.at("thresholds"));
  const Eigen::VectorXd sigma = detail::vector_from_json(j.at("sigma"));
  loaded.params.log_scale = sigma.array().log();
  loaded.params.validate();
  loaded.fit.params = loaded.params;
  loaded.fit.loglik = j.value("loglik", 0.0);
  loaded.fit.converged = j.value("converged", false);
  if (j.contains("standard_errors")) {
    StandardErrors se;
    se.mu = detail::vector_from_json(j["standard_errors"].at("mu"));
    se.log_lambda = detail::vector_from_json(j["standard_errors"].at("log_lambda"));
    se.thresholds = detail::vector_from_json(j["standard_errors"].at("thresholds"));
    se.hessian_ok = j["standard_errors"].value("hessian_ok", true);
    loaded.fit.standard_errors = se;
  }
  loaded.nu = j.value("nu", 1.0);
  loaded.penalty_kind = j.value("penalty_kind", "");
  loaded.identification = j.value("identification", "");
  return loaded;
}

inline ordered_json path_to_json(const PathResult& path, const std::vector<std::string>& labels,
                                 const FitConfig& config, const RunManifest& manifest) {
  ordered_json j;
  j["group_labels"] = labels;
  j["penalty_kind"] = to_string(config.penalty.kind);
  j["epsilon"] = config.penalty.epsilon;
  j["identification"] = identification_string(config.identification, labels);
  j["nu_grid"] = detail::vector_to_json(path.nu_grid);
  ordered_json fits = ordered_json::array();
  for (Eigen::Index i = 0; i < path.nu_grid.size(); ++i) {
    const FitResult& fit = path.fits[static_cast<std::size_t>(i)];
    ordered_json f;
    f["nu"] = path.nu_grid[i];
    f["mu"] = detail::vector_to_json(fit.params.mu);
    f["lambda"] = detail::vector_to_json(fit.params.lambdas());
    f["sigma"] = detail::vector_to_json(fit.params.log_scale.array().exp());
    f["thresholds"] = detail::vector_to_json(fit.params.thresholds);
    f["loglik"] = detail::finite_or_null(fit.loglik);
    f["penalty_mu"] = detail::finite_or_null(fit.penalty_mu);
    f["penalty_lambda"] = detail::finite_or_null(fit.penalty_lambda);
    f["penalty_proportion"] = detail::finite_or_null(fit.penalty_proportion);
    f["converged"] = fit.converged;
    f["iterations"] = fit.iterations;
    fits.push_back(f);
  }
  j["fits"] = fits;
  j["manifest"] = manifest.to_json();
  return j;
}

struct LoadedPath {
  std::vector<std::string> group_labels;
  PathResult path;
};

inline LoadedPath path_from_json(const nlohmann::json& j) {
  LoadedPath loaded;
  loaded.group_labels = j.at("group_labels").get<std::vector<std::string>>();
  loaded.path.nu_grid = detail::vector_from_json(j.at("nu_grid"));
  for (const auto& f : j.at("fits")) {
    FitResult fit;
    fit.params.mu = detail::vector_from_json(f.at("mu"));
    fit.params.thresholds = detail::vector_from_json(f.at("thresholds"));
    fit.params.log_scale = detail::vector_from_json(f.at("sigma")).array().log();
    fit.loglik = f.at("loglik").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                          : f.at("loglik").get<double>();
    fit.penalty_proportion = f.at("penalty_proportion").is_null()
                                 ? std::numeric_limits<double>::quiet_NaN()
                                 : f.at("penalty_proportion").get<double>();
    fit.converged = f.value("converged", false);
    loaded.path.fits.push_back(std::move(fit));
  }
  if (loaded.path.fits.size() != static_cast<std::size_t>(loaded.path.nu_grid.size()))
    throw data_error("path file: fits are not aligned with the nu grid");
  return loaded;
}

// One row per (nu, group).
inline std::string path_to_csv(const PathResult& path, const std::vector<std::string>& labels) {
  std::string out = "nu,group,mu,lambda,penalty_proportion,converged\n";
  for (Eigen::Index i = 0; i < path.nu_grid.size(); ++i) {
    const FitResult& fit = path.fits[static_cast<std::size_t>(i)];
    for (Eigen::Index g = 0; g < fit.params.n_groups(); ++g) {
      out += format_double(path.nu_grid[i]);
      out += ',' + labels[static_cast<std::size_t>(g)];
      out += ',' + format_double(fit.params.mu[g]);
      out += ',' + format_double(fit.params.lambda(g));
      out += ',' + format_double(fit.penalty_proportion);
      out += fit.converged ? ",true\n" : ",false\n";
    }
  }
  return out;
}

namespace detail {

inline ordered_json flags_to_json(const std::string& label, const GroupDifFlags& flags) {
  ordered_json g;
  g["group"] = label;
  g["mu"] = finite_or_null(flags.mu);
  g["lambda"] = finite_or_null(flags.lambda);
  g["mean_bound_flag"] = flags.mean_bound_flag;
  g["disc_bound_flag"] = flags.disc_bound_flag;
  if (flags.mean_ci_flag) {
    g["mean_ci_flag"] = *flags.mean_ci_flag;
    g["mu_ci"] = ordered_json::array({finite_or_null(*flags.mu_ci_lo), finite_or_null(*flags.mu_ci_hi)});
  }
  if (flags.disc_ci_flag) {
    g["disc_ci_flag"] = *flags.disc_ci_flag;
    g["lambda_ci"] =
        ordered_json::array({finite_or_null(*flags.lambda_ci_lo), finite_or_null(*flags.lambda_ci_hi)});
  }
  g["mean_flag"] = flags.mean_flag;
  g["disc_flag"] = flags.disc_flag;
  g["classification"] = to_string(flags.classification);
  return g;
}

inline ordered_json thresholds_to_json(const DifThresholds& t) {
  ordered_json j;
  j["mean_bound"] = t.mean_bound;
  j["disc_lower"] = t.disc_lower;
  j["disc_upper"] = t.disc_upper;
  j["alpha"] = t.alpha;
  j["combine"] = t.combine == DifCombineRule::bound_and_ci ? "both" : "either";
  return j;
}

}  // namespace detail

inline ordered_json dif_report_to_json(const DifReport& report, const RunManifest& manifest) {
  ordered_json j;
  j["thresholds"] = detail::thresholds_to_json(report.thresholds);
  ordered_json groups = ordered_json::array();
  for (std::size_t g = 0; g < report.groups.size(); ++g)
    groups.push_back(detail::flags_to_json(report.group_labels[g], report.groups[g]));
  j["groups"] = groups;
  j["manifest"] = manifest.to_json();
  return j;
}

inline ordered_json path_dif_to_json(const PathDifSeries& series,
                                     const std::vector<std::string>& labels,
                                     const RunManifest& manifest) {
  ordered_json j;
  j["thresholds"] = detail::thresholds_to_json(series.reports.front().thresholds);
  j["nu_grid"] = detail::vector_to_json(series.nu_grid);

  ordered_json stability = ordered_json::array();
  for (Eigen::Index g = 0; g < series.mean_flag_fraction.size(); ++g) {
    ordered_json s;
    s["group"] = labels[static_cast<std::size_t>(g)];
    s["mean_flag_fraction"] = series.mean_flag_fraction[g];
    s["disc_flag_fraction"] = series.disc_flag_fraction[g];
    stability.push_back(s);
  }
  j["stability"] = stability;

  ordered_json per_nu = ordered_json::array();
  for (std::size_t i = 0; i < series.reports.size(); ++i) {
    ordered_json entry;
    entry["nu"] = series.nu_grid[static_cast<Eigen::Index>(i)];
    ordered_json groups = ordered_json::array();
    for (std::size_t g = 0; g < series.reports[i].groups.size(); ++g)
      groups.push_back(detail::flags_to_json(labels[g], series.reports[i].groups[g]));
    entry["groups"] = groups;
    per_nu.push_back(entry);
  }
  j["per_nu"] = per_nu;
  j["manifest"] = manifest.to_json();
  return j;
}

inline std::string dif_report_to_csv(const DifReport& report) {
  std::string out = "group,mu,lambda,mean_flag,disc_flag,classification\n";
  for (std::size_t g = 0; g < report.groups.size(); ++g) {
    const GroupDifFlags& flags = report.groups[g];
    out += report.group_labels[g];
    out += ',' + format_double(flags.mu);
    out += ',' + format_double(flags.lambda);
    out += flags.mean_flag ? ",true" : ",false";
    out += flags.disc_flag ? ",true" : ",false";
    out += ',';
    out += to_string(flags.classification);
    out += '\n';
  }
  return out;
}

inline std::string icc_to_csv(const std::vector<std::string>& labels,
                              const std::vector<IccCurve>& curves) {
  std::string out = "group,theta,expected_score\n";
  for (std::size_t g = 0; g < curves.size(); ++g) {
    for (Eigen::Index i = 0; i < curves[g].theta.size(); ++i) {
      out += labels[g];
      out += ',' + format_double(curves[g].theta[i]);
      out += ',' + format_double(curves[g].score[i]) + '\n';
    }
  }
  return out;
}

}  // namespace hetop
