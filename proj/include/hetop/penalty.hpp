#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <optional>

#include "hetop/errors.hpp"
#include "hetop/types.hpp"

// Pairwise group-difference penalties
//
//   P0(theta) = sum_g sum_{h != g} f(theta_g, theta_h) / nu
//
// summed over ordered pairs, so every unordered pair is counted twice.

namespace hetop {

// Penalty contribution share of the penalized objective above which the fit
// is flagged for the sensitivity diagnostic.
inline constexpr double penalty_proportion_warn_threshold = 0.10;

inline double pair_penalty(double a, double b, const PenaltySpec& spec) {
  const double d = a - b;
  switch (spec.kind) {
    case PenaltyKind::ridge: return d * d;
    case PenaltyKind::lasso: return std::sqrt(d * d + spec.epsilon);
    case PenaltyKind::alignment: return std::sqrt(std::abs(d) + spec.epsilon);
  }
  return 0.0;
}

struct PenaltyValue {
  double value = 0.0;
  std::optional<Eigen::MatrixXd> per_pair;  // f(theta_g, theta_h) / nu, diagnostics only
};

inline PenaltyValue total_penalty(const Eigen::VectorXd& values, const PenaltySpec& spec,
                                  bool keep_pairs = false) {
  spec.validate();
  const Eigen::Index n = values.size();
  if (n < 2) throw data_error("pairwise penalty needs at least 2 groups");

  PenaltyValue out;
  if (keep_pairs) out.per_pair = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index g = 0; g < n; ++g) {
    for (Eigen::Index h = 0; h < n; ++h) {
      if (h == g) continue;
      const double term = pair_penalty(values[g], values[h], spec) / spec.nu;
      out.value += term;
      if (keep_pairs) (*out.per_pair)(g, h) = term;
    }
  }
  return out;
}

// Exact gradient of total_penalty. The two ordered copies of each pair make
// every unordered pair contribute twice.
inline Eigen::VectorXd penalty_gradient(const Eigen::VectorXd& values, const PenaltySpec& spec) {
  spec.validate();
  const Eigen::Index n = values.size();
  if (n < 2) throw data_error("pairwise penalty needs at least 2 groups");

  Eigen::VectorXd grad = Eigen::VectorXd::Zero(n);
  for (Eigen::Index g = 0; g < n; ++g) {
    for (Eigen::Index h = 0; h < n; ++h) {
      if (h == g) continue;
      const double d = values[g] - values[h];
      double df = 0.0;  // d f(theta_g, theta_h) / d theta_g
      switch (spec.kind) {
        case PenaltyKind::ridge:
          df = 2.0 * d;
          break;
        case PenaltyKind::lasso:
          df = d / std::sqrt(d * d + spec.epsilon);
          break;
        case PenaltyKind::alignment: {
          const double s = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
          df = s / (2.0 * std::sqrt(std::abs(d) + spec.epsilon));
          break;
        }
      }
      grad[g] += 2.0 * df / spec.nu;
    }
  }
  return grad;
}

// (P0(mu) + P0(lambda)) / |penalized objective| with our sign convention
// penalized objective = loglik - P0(mu) - P0(lambda). Returns NaN when the
// denominator vanishes.
inline double penalty_proportion(double loglik, double p_mu, double p_lambda) {
  const double denom = std::abs(loglik - p_mu - p_lambda);
  if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (p_mu + p_lambda) / denom;
}

inline bool penalty_proportion_warning(double proportion,
                                       double threshold = penalty_proportion_warn_threshold) {
  return std::isfinite(proportion) && proportion > threshold;
}

}  // namespace hetop
