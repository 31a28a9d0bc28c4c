#pragma once

#include <Eigen/Dense>
#include <stdexcept>

#include "hetop/errors.hpp"
#include "hetop/normal.hpp"
#include "hetop/types.hpp"

// Item characteristic curves: the expected item score of group g at latent
// value theta,
//
//   E[Y | theta, g] = sum_{k=1}^{K} Phi[lambda*_g (theta + mu*_g - tau_k)]
//
// each term being Pr(Y >= k), so the curve rises from 0 to the maximum
// score K.

namespace hetop {

inline double expected_score(double theta, Eigen::Index g, const GroupParams& params) {
  if (g < 0 || g >= params.n_groups()) throw std::out_of_range("group index out of range");
  const double lambda = params.lambda(g);
  const double shifted = theta + params.mu[g];
  double score = 0.0;
  for (Eigen::Index k = 0; k < params.n_thresholds(); ++k)
    score += norm_cdf(lambda * (shifted - params.thresholds[k]));
  return score;
}

// Analytic slope dE/dtheta = lambda sum_k phi(lambda (theta + mu - tau_k)).
inline double expected_score_slope(double theta, Eigen::Index g, const GroupParams& params) {
  const double lambda = params.lambda(g);
  const double shifted = theta + params.mu[g];
  double slope = 0.0;
  for (Eigen::Index k = 0; k < params.n_thresholds(); ++k)
    slope += norm_pdf(lambda * (shifted - params.thresholds[k]));
  return lambda * slope;
}

struct IccCurve {
  Eigen::VectorXd theta;
  Eigen::VectorXd score;
};

inline IccCurve icc_curve(Eigen::Index g, const GroupParams& params,
                          const Eigen::VectorXd& theta_grid) {
  if (theta_grid.size() == 0) throw data_error("theta grid is empty");
  for (Eigen::Index i = 1; i < theta_grid.size(); ++i)
    if (!(theta_grid[i] > theta_grid[i - 1])) throw data_error("theta grid must be increasing");

  IccCurve curve;
  curve.theta = theta_grid;
  curve.score.resize(theta_grid.size());
  for (Eigen::Index i = 0; i < theta_grid.size(); ++i)
    curve.score[i] = expected_score(theta_grid[i], g, params);
  return curve;
}

// 101 points on [-4, 4].
inline Eigen::VectorXd default_theta_grid() {
  return Eigen::VectorXd::LinSpaced(101, -4.0, 4.0);
}

}  // namespace hetop
