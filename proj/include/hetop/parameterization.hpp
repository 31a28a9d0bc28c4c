#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "hetop/errors.hpp"
#include "hetop/types.hpp"

// Mapping between GroupParams and the free parameter vector. Layout:
//   [ free means | free log-scales | tau_1, ln(tau_2-tau_1), ..., ln(tau_K-tau_{K-1}) ]
// Under sum-to-zero the last group is completed as the negative sum of the
// others; under reference identification the reference slot is pinned to 0.
// The log-increment threshold map keeps tau strictly increasing for any
// finite vector.

namespace hetop {

inline Eigen::Index free_parameter_length(Eigen::Index n_groups, Eigen::Index n_thresholds) {
  return 2 * (n_groups - 1) + n_thresholds;
}

namespace detail {

// Writes the G-1 free entries of a constrained G-vector into dst.
inline void pack_group_block(const Eigen::VectorXd& full, const IdentificationScheme& scheme,
                             double tolerance, const char* what,
                             Eigen::Ref<Eigen::VectorXd> dst) {
  const Eigen::Index g_count = full.size();
  if (scheme.kind == IdentificationScheme::Kind::sum_to_zero) {
    if (std::abs(full.sum()) > tolerance)
      throw constraint_error(std::string(what) + " does not sum to zero");
    dst = full.head(g_count - 1);
  } else {
    if (std::abs(full[scheme.reference]) > tolerance)
      throw constraint_error(std::string(what) + " of the reference group is not zero");
    Eigen::Index j = 0;
    for (Eigen::Index g = 0; g < g_count; ++g)
      if (g != scheme.reference) dst[j++] = full[g];
  }
}

inline Eigen::VectorXd unpack_group_block(const Eigen::Ref<const Eigen::VectorXd>& free,
                                          const IdentificationScheme& scheme,
                                          Eigen::Index g_count) {
  Eigen::VectorXd full(g_count);
  if (scheme.kind == IdentificationScheme::Kind::sum_to_zero) {
    full.head(g_count - 1) = free;
    full[g_count - 1] = -free.sum();
  } else {
    Eigen::Index j = 0;
    for (Eigen::Index g = 0; g < g_count; ++g)
      full[g] = (g == scheme.reference) ? 0.0 : free[j++];
  }
  return full;
}

// Chain rule for one group block: gradient with respect to the full
// G-vector -> gradient with respect to its G-1 free entries.
inline void chain_group_block(const Eigen::VectorXd& d_full, const IdentificationScheme& scheme,
                              Eigen::Ref<Eigen::VectorXd> d_free) {
  const Eigen::Index g_count = d_full.size();
  if (scheme.kind == IdentificationScheme::Kind::sum_to_zero) {
    d_free = d_full.head(g_count - 1).array() - d_full[g_count - 1];
  } else {
    Eigen::Index j = 0;
    for (Eigen::Index g = 0; g < g_count; ++g)
      if (g != scheme.reference) d_free[j++] = d_full[g];
  }
}

// Chain rule for thresholds: d/dtau -> d/d(tau_1, log-increments).
// tau_k = t_1 + sum_{j<=k, j>=2} exp(t_j), so dtau_k/dt_1 = 1 and
// dtau_k/dt_j = (tau_j - tau_{j-1}) for 2 <= j <= k.
inline void chain_thresholds(const Eigen::VectorXd& d_tau, const Eigen::VectorXd& thresholds,
                             Eigen::Ref<Eigen::VectorXd> d_free) {
  const Eigen::Index k_count = d_tau.size();
  double tail = 0.0;  // sum_{k>=j} d_tau_k, built from the right
  for (Eigen::Index j = k_count - 1; j >= 0; --j) {
    tail += d_tau[j];
    d_free[j] = (j == 0) ? tail : (thresholds[j] - thresholds[j - 1]) * tail;
  }
}

}  // namespace detail

inline FreeParameterVector pack(const GroupParams& params, const IdentificationScheme& scheme,
                                double tolerance = 1e-8) {
  params.validate();
  const Eigen::Index g_count = params.n_groups();
  const Eigen::Index k_count = params.n_thresholds();
  scheme.validate(g_count);

  FreeParameterVector v(free_parameter_length(g_count, k_count));
  detail::pack_group_block(params.mu, scheme, tolerance, "mu", v.head(g_count - 1));
  detail::pack_group_block(params.log_scale, scheme, tolerance, "log_scale",
                           v.segment(g_count - 1, g_count - 1));
  v[2 * (g_count - 1)] = params.thresholds[0];
  for (Eigen::Index k = 1; k < k_count; ++k)
    v[2 * (g_count - 1) + k] = std::log(params.thresholds[k] - params.thresholds[k - 1]);
  return v;
}

inline GroupParams unpack(const FreeParameterVector& v, const IdentificationScheme& scheme,
                          Eigen::Index n_groups, Eigen::Index n_thresholds) {
  scheme.validate(n_groups);
  if (v.size() != free_parameter_length(n_groups, n_thresholds))
    throw data_error("free parameter vector has length " + std::to_string(v.size()) +
                     ", expected " + std::to_string(free_parameter_length(n_groups, n_thresholds)));

  GroupParams params;
  params.mu = detail::unpack_group_block(v.head(n_groups - 1), scheme, n_groups);
  params.log_scale = detail::unpack_group_block(v.segment(n_groups - 1, n_groups - 1), scheme, n_groups);
  params.thresholds.resize(n_thresholds);
  params.thresholds[0] = v[2 * (n_groups - 1)];
  for (Eigen::Index k = 1; k < n_thresholds; ++k)
    params.thresholds[k] = params.thresholds[k - 1] + std::exp(v[2 * (n_groups - 1) + k]);
  return params;
}

// Gradient chain: (d/dmu, d/dgamma, d/dtau) -> d/d(free vector).
inline FreeParameterVector chain_to_free(const Eigen::VectorXd& d_mu,
                                         const Eigen::VectorXd& d_gamma,
                                         const Eigen::VectorXd& d_tau,
                                         const GroupParams& params,
                                         const IdentificationScheme& scheme) {
  const Eigen::Index g_count = d_mu.size();
  const Eigen::Index k_count = d_tau.size();
  FreeParameterVector grad(free_parameter_length(g_count, k_count));
  detail::chain_group_block(d_mu, scheme, grad.head(g_count - 1));
  detail::chain_group_block(d_gamma, scheme, grad.segment(g_count - 1, g_count - 1));
  detail::chain_thresholds(d_tau, params.thresholds, grad.tail(k_count));
  return grad;
}

// Jacobian of the natural parameters (mu_1..G, gamma_1..G, tau_1..K) with
// respect to the free vector; used for delta-method standard errors.
inline Eigen::MatrixXd natural_jacobian(const GroupParams& params,
                                        const IdentificationScheme& scheme) {
  const Eigen::Index g_count = params.n_groups();
  const Eigen::Index k_count = params.n_thresholds();
  const Eigen::Index n_free = free_parameter_length(g_count, k_count);
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(2 * g_count + k_count, n_free);

  auto fill_block = [&](Eigen::Index row0, Eigen::Index col0) {
    if (scheme.kind == IdentificationScheme::Kind::sum_to_zero) {
      for (Eigen::Index i = 0; i < g_count - 1; ++i) jac(row0 + i, col0 + i) = 1.0;
      for (Eigen::Index i = 0; i < g_count - 1; ++i) jac(row0 + g_count - 1, col0 + i) = -1.0;
    } else {
      Eigen::Index j = 0;
      for (Eigen::Index g = 0; g < g_count; ++g)
        if (g != scheme.reference) jac(row0 + g, col0 + j++) = 1.0;
    }
  };
  fill_block(0, 0);
  fill_block(g_count, g_count - 1);

  const Eigen::Index tau_col = 2 * (g_count - 1);
  for (Eigen::Index k = 0; k < k_count; ++k) {
    jac(2 * g_count + k, tau_col) = 1.0;
    for (Eigen::Index j = 1; j <= k; ++j)
      jac(2 * g_count + k, tau_col + j) = params.thresholds[j] - params.thresholds[j - 1];
  }
  return jac;
}

}  // namespace hetop
