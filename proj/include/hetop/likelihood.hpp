#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hetop/errors.hpp"
#include "hetop/normal.hpp"
#include "hetop/parameterization.hpp"
#include "hetop/types.hpp"

// Grouped heteroskedastic ordered probit likelihood.
//
//   Pr(Y = k | g) = Phi(lambda_g (mu_g - tau_k)) - Phi(lambda_g (mu_g - tau_{k+1}))
//
// with tau_0 = -inf and tau_{K+1} = +inf, so the survivor values
// S_k = Phi(lambda_g (mu_g - tau_k)) telescope: S_0 = 1, S_{K+1} = 0 and
// Pr(Y = k) = S_k - S_{k+1}. All log terms clamp probabilities at 1e-300 so
// the objective stays finite; cells with zero count contribute exactly 0.

namespace hetop {

inline constexpr double min_category_prob = 1e-300;

namespace detail {

// z_k = lambda (mu - tau_k) for k = 1..K plus the +/-inf sentinels at the
// ends; strictly decreasing in k.
inline Eigen::VectorXd survivor_arguments(double mu, double lambda,
                                          const Eigen::VectorXd& thresholds) {
  const Eigen::Index k_count = thresholds.size();
  Eigen::VectorXd z(k_count + 2);
  z[0] = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < k_count; ++k) z[k + 1] = lambda * (mu - thresholds[k]);
  z[k_count + 1] = -std::numeric_limits<double>::infinity();
  return z;
}

}  // namespace detail

inline double category_prob(double mu, double lambda, const Eigen::VectorXd& thresholds,
                            Eigen::Index k) {
  if (k < 0 || k > thresholds.size())
    throw std::out_of_range("category index out of range");
  const double z_hi = (k == 0) ? std::numeric_limits<double>::infinity()
                               : lambda * (mu - thresholds[k - 1]);
  const double z_lo = (k == thresholds.size()) ? -std::numeric_limits<double>::infinity()
                                               : lambda * (mu - thresholds[k]);
  // z_hi >= z_lo, so the interval is Phi(z_hi) - Phi(z_lo).
  const double p = norm_interval_prob(z_lo, z_hi);
  return p < 0.0 ? 0.0 : p;
}

inline Eigen::VectorXd all_category_probs(const GroupParams& params, Eigen::Index g) {
  if (g < 0 || g >= params.n_groups()) throw std::out_of_range("group index out of range");
  const double lambda = params.lambda(g);
  const Eigen::VectorXd z = detail::survivor_arguments(params.mu[g], lambda, params.thresholds);
  const Eigen::Index n_cat = params.n_thresholds() + 1;
  Eigen::VectorXd probs(n_cat);
  for (Eigen::Index k = 0; k < n_cat; ++k) {
    const double p = norm_interval_prob(z[k + 1], z[k]);
    probs[k] = p < 0.0 ? 0.0 : p;
  }
  return probs;
}

// Weighted grouped log-likelihood, excluding the multinomial constant C.
inline double grouped_loglik(const CategoryCountTable& table, const GroupParams& params) {
  if (params.n_groups() != table.n_groups() || params.n_thresholds() != table.n_thresholds())
    throw data_error("parameter dimensions do not match the count table");
  double total = 0.0;
  for (Eigen::Index g = 0; g < table.n_groups(); ++g) {
    const Eigen::VectorXd probs = all_category_probs(params, g);
    double group_term = 0.0;
    for (Eigen::Index k = 0; k < table.n_categories(); ++k) {
      const double n_gk = table.counts(g, k);
      if (n_gk == 0.0) continue;
      group_term += n_gk * std::log(std::max(probs[k], min_category_prob));
    }
    total += table.group_weights[g] * group_term;
  }
  return total;
}

// C = sum_g [ln Gamma(n_g + 1) - sum_k ln Gamma(n_gk + 1)]; log-gamma
// generalizes the factorials to real-valued counts.
inline double multinomial_constant(const CategoryCountTable& table) {
  double c = 0.0;
  for (Eigen::Index g = 0; g < table.n_groups(); ++g) {
    c += std::lgamma(table.row_total(g) + 1.0);
    for (Eigen::Index k = 0; k < table.n_categories(); ++k)
      c -= std::lgamma(table.counts(g, k) + 1.0);
  }
  return c;
}

namespace detail {

// Log-likelihood value plus its gradient with respect to the natural
// parameters (mu_g, gamma_g, tau_k). Shared by the free-vector gradient and
// the penalized objective.
struct NaturalGradient {
  double value = 0.0;
  Eigen::VectorXd d_mu;     // G
  Eigen::VectorXd d_gamma;  // G
  Eigen::VectorXd d_tau;    // K
};

inline NaturalGradient loglik_natural_gradient(const CategoryCountTable& table,
                                               const GroupParams& params) {
  const Eigen::Index g_count = table.n_groups();
  const Eigen::Index k_count = table.n_thresholds();
  NaturalGradient out;
  out.d_mu = Eigen::VectorXd::Zero(g_count);
  out.d_gamma = Eigen::VectorXd::Zero(g_count);
  out.d_tau = Eigen::VectorXd::Zero(k_count);

  for (Eigen::Index g = 0; g < g_count; ++g) {
    const double w = table.group_weights[g];
    const double lambda = params.lambda(g);
    const Eigen::VectorXd z = survivor_arguments(params.mu[g], lambda, params.thresholds);

    Eigen::VectorXd pdf(k_count + 2);  // phi(z_k); 0 at the infinite ends
    for (Eigen::Index k = 0; k < k_count + 2; ++k) pdf[k] = norm_pdf(z[k]);

    for (Eigen::Index k = 0; k <= k_count; ++k) {
      const double n_gk = table.counts(g, k);
      if (n_gk == 0.0) continue;
      double p = norm_interval_prob(z[k + 1], z[k]);
      p = std::max(p, min_category_prob);
      out.value += w * n_gk * std::log(p);

      const double ratio = w * n_gk / p;
      // d p / d mu = lambda (phi(z_k) - phi(z_{k+1}))
      out.d_mu[g] += ratio * lambda * (pdf[k] - pdf[k + 1]);
      // d p / d gamma = -(z_k phi(z_k) - z_{k+1} phi(z_{k+1}))  [z phi -> 0 at inf]
      const double zk_pdf = (k == 0) ? 0.0 : z[k] * pdf[k];
      const double zk1_pdf = (k == k_count) ? 0.0 : z[k + 1] * pdf[k + 1];
      out.d_gamma[g] -= ratio * (zk_pdf - zk1_pdf);
      // d p / d tau_k = -lambda phi(z_k); d p / d tau_{k+1} = +lambda phi(z_{k+1})
      if (k >= 1) out.d_tau[k - 1] -= ratio * lambda * pdf[k];
      if (k <= k_count - 1) out.d_tau[k] += ratio * lambda * pdf[k + 1];
    }
  }
  return out;
}

}  // namespace detail

// Gradient of grouped_loglik(unpack(v)) with respect to the free vector.
inline FreeParameterVector loglik_gradient(const CategoryCountTable& table,
                                           const FreeParameterVector& v,
                                           const IdentificationScheme& scheme) {
  const GroupParams params = unpack(v, scheme, table.n_groups(), table.n_thresholds());
  const detail::NaturalGradient nat = detail::loglik_natural_gradient(table, params);
  return chain_to_free(nat.d_mu, nat.d_gamma, nat.d_tau, params, scheme);
}

}  // namespace hetop
