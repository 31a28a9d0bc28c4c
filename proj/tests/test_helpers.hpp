#pragma once

#include <Eigen/Dense>
#include <random>
#include <string>
#include <vector>

#include "hetop/estimator.hpp"
#include "hetop/parameterization.hpp"
#include "hetop/types.hpp"

namespace hetop_test {

// Random valid GroupParams with moderate locations/scales and spread-out
// thresholds; keeps category probabilities away from the underflow floor.
inline hetop::GroupParams random_params(std::mt19937_64& rng, Eigen::Index g_count,
                                        Eigen::Index k_count) {
  std::uniform_real_distribution<double> mu_dist(-1.5, 1.5);
  std::uniform_real_distribution<double> gamma_dist(-0.6, 0.6);
  std::uniform_real_distribution<double> gap_dist(0.3, 1.0);

  hetop::GroupParams params;
  params.mu.resize(g_count);
  params.log_scale.resize(g_count);
  for (Eigen::Index g = 0; g < g_count; ++g) {
    params.mu[g] = mu_dist(rng);
    params.log_scale[g] = gamma_dist(rng);
  }
  params.thresholds.resize(k_count);
  double t = -0.5 * static_cast<double>(k_count) * 0.65;
  for (Eigen::Index k = 0; k < k_count; ++k) {
    params.thresholds[k] = t;
    t += gap_dist(rng);
  }
  return params;
}

// Same, already satisfying the given identification scheme.
inline hetop::GroupParams random_identified_params(std::mt19937_64& rng, Eigen::Index g_count,
                                                   Eigen::Index k_count,
                                                   const hetop::IdentificationScheme& scheme = {}) {
  hetop::GroupParams params = random_params(rng, g_count, k_count);
  if (scheme.kind == hetop::IdentificationScheme::Kind::sum_to_zero) {
    params.mu.array() -= params.mu.mean();
    params.log_scale.array() -= params.log_scale.mean();
  } else {
    params.mu.array() -= params.mu[scheme.reference];
    params.log_scale.array() -= params.log_scale[scheme.reference];
  }
  return params;
}

inline hetop::CategoryCountTable random_table(std::mt19937_64& rng, Eigen::Index g_count,
                                              Eigen::Index k_count, double scale = 50.0) {
  std::uniform_real_distribution<double> cell(0.5, scale);
  Eigen::MatrixXd counts(g_count, k_count + 1);
  for (Eigen::Index g = 0; g < g_count; ++g)
    for (Eigen::Index k = 0; k <= k_count; ++k) counts(g, k) = cell(rng);
  std::vector<std::string> labels;
  for (Eigen::Index g = 0; g < g_count; ++g) labels.push_back("g" + std::to_string(g + 1));
  return hetop::CategoryCountTable(labels, counts);
}

// Central finite differences of a scalar function of a free vector.
template <typename Fn>
Eigen::VectorXd finite_difference_gradient(const Fn& f, const Eigen::VectorXd& x,
                                           double step = 1e-5) {
  Eigen::VectorXd grad(x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + step;
    const double f_plus = f(probe);
    probe[i] = x[i] - step;
    const double f_minus = f(probe);
    probe[i] = x[i];
    grad[i] = (f_plus - f_minus) / (2.0 * step);
  }
  return grad;
}

}  // namespace hetop_test
