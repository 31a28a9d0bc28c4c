#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

// Dense BFGS minimizer with a strong-Wolfe line search (bracket + zoom,
// cubic interpolation). Accepted iterates strictly decrease the objective.
// Convergence is declared when ||grad||_2 <= tolerance * max(1, |f|); an
// absolute tolerance is unattainable in double precision once the objective
// carries the magnitude of a large-count likelihood.

namespace hetop {

struct BfgsOptions {
  int max_iterations = 500;
  double gradient_tolerance = 1e-8;  // relative to max(1, |f|)
  int max_line_search_steps = 50;
};

struct BfgsResult {
  Eigen::VectorXd x;
  double f = 0.0;
  Eigen::VectorXd grad;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string stop_reason;
  std::vector<double> f_history;  // objective after every accepted step
};

namespace detail {

// Minimizer of the cubic through (a, fa, ga) and (b, fb, gb); falls back to
// bisection when the interpolant is degenerate or leaves the bracket.
inline double cubic_minimizer(double a, double fa, double ga, double b, double fb, double gb) {
  const double d1 = ga + gb - 3.0 * (fa - fb) / (a - b);
  const double disc = d1 * d1 - ga * gb;
  if (disc < 0.0) return 0.5 * (a + b);
  const double d2 = std::copysign(std::sqrt(disc), b - a);
  double t = b - (b - a) * (gb + d2 - d1) / (gb - ga + 2.0 * d2);
  const double lo = std::min(a, b), hi = std::max(a, b);
  const double margin = 0.1 * (hi - lo);
  if (!std::isfinite(t) || t < lo + margin || t > hi - margin) t = 0.5 * (a + b);
  return t;
}

}  // namespace detail

// fg must return f(x) and fill grad (same size as x).
template <typename ObjectiveFn>
BfgsResult bfgs_minimize(const ObjectiveFn& fg, const Eigen::VectorXd& x0,
                         const BfgsOptions& options = {}) {
  constexpr double c1 = 1e-4;  // Armijo
  constexpr double c2 = 0.9;   // curvature

  const Eigen::Index n = x0.size();
  BfgsResult result;
  result.x = x0;
  result.grad.resize(n);
  result.f = fg(result.x, result.grad);
  result.grad_norm = result.grad.norm();
  result.f_history.push_back(result.f);

  if (!std::isfinite(result.f) || !result.grad.allFinite()) {
    result.stop_reason = "objective not finite at the starting point";
    return result;
  }

  auto converged_at = [&](double f, double gnorm) {
    return gnorm <= options.gradient_tolerance * std::max(1.0, std::abs(f));
  };
  if (converged_at(result.f, result.grad_norm)) {
    result.converged = true;
    result.stop_reason = "gradient tolerance reached at start";
    return result;
  }

  Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(n, n);
  bool h_is_identity = true;

  Eigen::VectorXd direction(n), x_new(n), grad_new(n);

  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    result.iterations = iter;
    direction = -(h_inv * result.grad);
    double dg = direction.dot(result.grad);
    if (!(dg < 0.0)) {  // not a descent direction: reset curvature memory
      h_inv.setIdentity();
      h_is_identity = true;
      direction = -result.grad;
      dg = -result.grad.squaredNorm();
    }

    // First step of a fresh (identity) Hessian: scale to unit length so a
    // huge gradient does not launch the search into overflow territory.
    double alpha = 1.0;
    if (h_is_identity) {
      const double dnorm = direction.norm();
      if (dnorm > 1.0) alpha = 1.0 / dnorm;
    }

    const double f0 = result.f;
    const double g0 = dg;

    // Strong Wolfe line search (Nocedal & Wright alg. 3.5/3.6).
    double alpha_prev = 0.0, f_prev = f0, g_prev = g0;
    double alpha_lo = 0.0, alpha_hi = 0.0;
    double f_lo = f0, g_lo = g0, f_hi = 0.0, g_hi = 0.0;
    bool bracketed = false, accepted = false;
    double f_alpha = f0;
    double g_alpha = g0;

    for (int ls = 0; ls < options.max_line_search_steps; ++ls) {
      x_new = result.x + alpha * direction;
      f_alpha = fg(x_new, grad_new);
      g_alpha = grad_new.dot(direction);
      const bool finite = std::isfinite(f_alpha) && grad_new.allFinite();

      if (!finite || f_alpha > f0 + c1 * alpha * g0 || (ls > 0 && f_alpha >= f_prev)) {
        alpha_lo = alpha_prev; f_lo = f_prev; g_lo = g_prev;
        alpha_hi = alpha; f_hi = finite ? f_alpha : std::numeric_limits<double>::max();
        g_hi = finite ? g_alpha : 0.0;
        bracketed = true;
        break;
      }
      if (std::abs(g_alpha) <= -c2 * g0) { accepted = true; break; }
      if (g_alpha >= 0.0) {
        alpha_lo = alpha; f_lo = f_alpha; g_lo = g_alpha;
        alpha_hi = alpha_prev; f_hi = f_prev; g_hi = g_prev;
        bracketed = true;
        break;
      }
      alpha_prev = alpha; f_prev = f_alpha; g_prev = g_alpha;
      alpha *= 2.0;
    }

    if (bracketed && !accepted) {
      for (int z = 0; z < options.max_line_search_steps; ++z) {
        if (std::abs(alpha_hi - alpha_lo) <
            1e-16 * std::max(1.0, std::max(std::abs(alpha_lo), std::abs(alpha_hi))))
          break;
        alpha = detail::cubic_minimizer(alpha_lo, f_lo, g_lo, alpha_hi, f_hi, g_hi);
        x_new = result.x + alpha * direction;
        f_alpha = fg(x_new, grad_new);
        g_alpha = grad_new.dot(direction);
        const bool finite = std::isfinite(f_alpha) && grad_new.allFinite();

        if (!finite || f_alpha > f0 + c1 * alpha * g0 || f_alpha >= f_lo) {
          alpha_hi = alpha;
          f_hi = finite ? f_alpha : std::numeric_limits<double>::max();
          g_hi = finite ? g_alpha : 0.0;
        } else {
          if (std::abs(g_alpha) <= -c2 * g0) { accepted = true; break; }
          if (g_alpha * (alpha_hi - alpha_lo) >= 0.0) {
            alpha_hi = alpha_lo; f_hi = f_lo; g_hi = g_lo;
          }
          alpha_lo = alpha; f_lo = f_alpha; g_lo = g_alpha;
        }
      }
    }

    // A stalled zoom (or an exhausted expansion) may still hold a strict
    // improvement at the best point seen; take it rather than give up.
    if (!accepted) {
      const double alpha_best = bracketed ? alpha_lo : alpha_prev;
      const double f_best = bracketed ? f_lo : f_prev;
      if (alpha_best > 0.0 && f_best < f0) {
        alpha = alpha_best;
        x_new = result.x + alpha * direction;
        f_alpha = fg(x_new, grad_new);
        accepted = std::isfinite(f_alpha) && grad_new.allFinite() && f_alpha < f0;
      }
    }

    if (!accepted || !(f_alpha < f0)) {
      result.stop_reason = "line search could not find further decrease";
      break;
    }

    const Eigen::VectorXd step = x_new - result.x;
    const Eigen::VectorXd grad_delta = grad_new - result.grad;
    result.x = x_new;
    result.f = f_alpha;
    result.grad = grad_new;
    result.grad_norm = grad_new.norm();
    result.f_history.push_back(result.f);

    if (converged_at(result.f, result.grad_norm)) {
      result.converged = true;
      result.stop_reason = "gradient tolerance reached";
      return result;
    }

    const double sy = step.dot(grad_delta);
    if (sy > 1e-12 * step.norm() * grad_delta.norm()) {
      if (h_is_identity) {  // scale before the first update (N&W eq. 6.20)
        h_inv *= sy / grad_delta.squaredNorm();
        h_is_identity = false;
      }
      const double rho = 1.0 / sy;
      const Eigen::VectorXd h_y = h_inv * grad_delta;
      // H <- (I - rho s y') H (I - rho y s') + rho s s'
      h_inv.noalias() -= rho * (step * h_y.transpose() + h_y * step.transpose());
      h_inv.noalias() += (rho * rho * grad_delta.dot(h_y) + rho) * (step * step.transpose());
    }
  }

  if (result.stop_reason.empty()) result.stop_reason = "iteration limit reached";
  result.converged = converged_at(result.f, result.grad_norm);
  return result;
}

}  // namespace hetop
