#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hetop/errors.hpp"

namespace hetop {

// Weighted category counts n_gk per group g and category k = 0..K. Cells are
// real-valued so survey-weighted "population counts" pass through unchanged.
// Immutable after construction.
struct CategoryCountTable {
  std::vector<std::string> group_labels;  // G display strings
  Eigen::MatrixXd counts;                 // G x (K+1), nonnegative
  Eigen::VectorXd group_weights;          // w_g, default 1.0

  CategoryCountTable() = default;

  CategoryCountTable(std::vector<std::string> labels, Eigen::MatrixXd n,
                     Eigen::VectorXd weights = Eigen::VectorXd())
      : group_labels(std::move(labels)), counts(std::move(n)),
        group_weights(std::move(weights)) {
    if (group_weights.size() == 0) group_weights = Eigen::VectorXd::Ones(counts.rows());
    validate();
  }

  Eigen::Index n_groups() const { return counts.rows(); }
  Eigen::Index n_categories() const { return counts.cols(); }  // K+1
  Eigen::Index n_thresholds() const { return counts.cols() - 1; }  // K
  double row_total(Eigen::Index g) const { return counts.row(g).sum(); }

  void validate() const {
    const Eigen::Index g_count = counts.rows();
    const Eigen::Index k_count = counts.cols();
    if (g_count < 2) throw data_error("count table needs at least 2 groups");
    if (k_count < 2) throw data_error("count table needs at least 2 categories");
    if (static_cast<Eigen::Index>(group_labels.size()) != g_count)
      throw data_error("group label count does not match count rows");
    if (group_weights.size() != g_count)
      throw data_error("group weight count does not match count rows");
    for (Eigen::Index g = 0; g < g_count; ++g) {
      if (!(group_weights[g] >= 0.0) || !std::isfinite(group_weights[g]))
        throw data_error("negative or non-finite weight for group '" + group_labels[g] + "'");
      double total = 0.0;
      for (Eigen::Index k = 0; k < k_count; ++k) {
        const double cell = counts(g, k);
        if (!(cell >= 0.0) || !std::isfinite(cell))
          throw data_error("negative or non-finite count in group '" + group_labels[g] + "'");
        total += cell;
      }
      if (!(total > 0.0))
        throw data_error("group '" + group_labels[g] + "' has zero total count");
    }
  }
};

// Group latent means mu*_g, log-scales gamma_g and shared thresholds tau_k.
// sigma*_g = exp(gamma_g); the discrimination lambda*_g = 1/sigma*_g is
// always derived, never stored.
struct GroupParams {
  Eigen::VectorXd mu;          // G
  Eigen::VectorXd log_scale;   // G (gamma_g)
  Eigen::VectorXd thresholds;  // K, strictly increasing

  Eigen::Index n_groups() const { return mu.size(); }
  Eigen::Index n_thresholds() const { return thresholds.size(); }

  double sigma(Eigen::Index g) const { return std::exp(log_scale[g]); }
  double lambda(Eigen::Index g) const { return std::exp(-log_scale[g]); }
  Eigen::VectorXd lambdas() const { return (-log_scale.array()).exp(); }

  void validate() const {
    if (mu.size() != log_scale.size())
      throw data_error("mu and log_scale length mismatch");
    if (mu.size() < 1 || thresholds.size() < 1)
      throw data_error("group parameters need at least one group and one threshold");
    for (Eigen::Index k = 1; k < thresholds.size(); ++k)
      if (!(thresholds[k] > thresholds[k - 1]))
        throw data_error("thresholds must be strictly increasing");
    for (Eigen::Index i = 0; i < mu.size(); ++i)
      if (!std::isfinite(mu[i]) || !std::isfinite(log_scale[i]))
        throw data_error("non-finite group parameter");
    for (Eigen::Index k = 0; k < thresholds.size(); ++k)
      if (!std::isfinite(thresholds[k])) throw data_error("non-finite threshold");
  }
};

// Location/scale identification. Applies to both the mu and the gamma
// vector: either one group is pinned to zero or the vector sums to zero.
struct IdentificationScheme {
  enum class Kind { reference_group, sum_to_zero };

  Kind kind = Kind::sum_to_zero;
  Eigen::Index reference = 0;  // used when kind == reference_group

  static IdentificationScheme sum_to_zero() { return {}; }
  static IdentificationScheme reference_group(Eigen::Index index) {
    IdentificationScheme s;
    s.kind = Kind::reference_group;
    s.reference = index;
    return s;
  }

  void validate(Eigen::Index n_groups) const {
    if (kind == Kind::reference_group && (reference < 0 || reference >= n_groups))
      throw data_error("reference group index out of range");
  }
};

enum class PenaltyKind { ridge, lasso, alignment };

inline const char* to_string(PenaltyKind k) {
  switch (k) {
    case PenaltyKind::ridge: return "ridge";
    case PenaltyKind::lasso: return "lasso";
    case PenaltyKind::alignment: return "alignment";
  }
  return "?";
}

// Pairwise-difference penalty specification. nu divides the penalty, so a
// larger nu means weaker regularization. epsilon smooths the lasso and
// alignment kinds; it must be positive for them so gradients stay bounded.
struct PenaltySpec {
  PenaltyKind kind = PenaltyKind::alignment;
  double nu = 1.0;
  double epsilon = 1e-4;

  void validate() const {
    if (!(nu > 0.0)) throw data_error("penalty nu must be positive");
    if (kind != PenaltyKind::ridge && !(epsilon > 0.0))
      throw data_error("lasso/alignment penalty requires epsilon > 0");
    if (!(epsilon >= 0.0)) throw data_error("penalty epsilon must be nonnegative");
  }
};

// Per-parameter standard errors from the Hessian at the optimum. Entries are
// NaN where the (negative inverse) Hessian gave no usable variance.
struct StandardErrors {
  Eigen::VectorXd mu;          // G
  Eigen::VectorXd log_lambda;  // G; ln(lambda*) = -gamma has the same SE as gamma
  Eigen::VectorXd thresholds;  // K
  bool hessian_ok = true;
};

struct FitResult {
  GroupParams params;
  double loglik = 0.0;      // unpenalized ln L, excluding the constant C
  double constant_c = 0.0;  // multinomial constant
  double penalty_mu = 0.0;
  double penalty_lambda = 0.0;
  double penalized_objective = 0.0;  // loglik - penalty_mu - penalty_lambda
  double penalty_proportion = 0.0;   // NaN when the denominator vanishes
  bool converged = false;
  int iterations = 0;
  double gradient_norm = 0.0;
  std::optional<StandardErrors> standard_errors;
};

// The flat unconstrained vector actually optimized: G-1 free means, G-1 free
// log-scales, then tau_1 and K-1 log-increments.
using FreeParameterVector = Eigen::VectorXd;

}  // namespace hetop
