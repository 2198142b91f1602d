#pragma once

// Weighted conformal barycenter of a finite configuration of disc points,
// computed by Riemannian gradient descent with Armijo backtracking on the
// conformal potential.

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "embolic/disc_geometry.hpp"
#include "embolic/util.hpp"

namespace embolic {

/// Points with nonnegative weights of strictly positive total mass.
/// Zero-weight points are dropped at construction; weights are normalized
/// to sum to 1.
class WeightedConfiguration {
 public:
  WeightedConfiguration(std::vector<DiscPoint> points,
                        std::vector<double> weights) {
    if (points.size() != weights.size()) {
      throw DimensionError("WeightedConfiguration: size mismatch");
    }
    if (points.empty()) {
      throw DimensionError("WeightedConfiguration: empty configuration");
    }
    double total = 0.0;
    for (double w : weights) {
      if (!(w >= 0.0)) {
        throw DomainError("WeightedConfiguration: negative weight");
      }
      total += w;
    }
    if (!(total > 0.0)) {
      throw DomainError("WeightedConfiguration: weights sum to zero");
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (weights[i] > 0.0) {
        points_.push_back(points[i]);
        weights_.push_back(weights[i] / total);
      }
    }
  }

  /// Unweighted configuration: all weights 1/N.
  explicit WeightedConfiguration(std::vector<DiscPoint> points)
      : WeightedConfiguration(points,
                              std::vector<double>(points.size(), 1.0)) {}

  const std::vector<DiscPoint>& points() const { return points_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return points_.size(); }

 private:
  std::vector<DiscPoint> points_;
  std::vector<double> weights_;
};

struct SolverOptions {
  double grad_tolerance = 1e-8;
  std::size_t max_iterations = 500;
  double initial_step = 0.1;
  double backtrack_factor = 0.5;
};

/// Conformal potential -sum w_i log[(1-|a|^2)(1-|z_i|^2)/|1-conj(a)z_i|^2],
/// weights normalized to sum 1.
inline double potential(const WeightedConfiguration& config,
                        const DiscPoint& a) {
  const complexd av = a.value();
  const double one_minus_a2 = 1.0 - std::norm(av);
  double h = 0.0;
  for (std::size_t i = 0; i < config.size(); ++i) {
    const complexd z = config.points()[i].value();
    double term = std::log(one_minus_a2) + std::log(1.0 - std::norm(z)) -
                  std::log(std::norm(1.0 - std::conj(av) * z));
    h -= config.weights()[i] * term;
  }
  return h;
}

/// Euclidean gradient of the potential at a, returned as re + i*im.
inline complexd potential_gradient(const WeightedConfiguration& config,
                                   const DiscPoint& a) {
  const complexd av = a.value();
  const double one_minus_a2 = 1.0 - std::norm(av);
  complexd g(0.0, 0.0);
  for (std::size_t i = 0; i < config.size(); ++i) {
    const complexd z = config.points()[i].value();
    g += config.weights()[i] *
         (av / one_minus_a2 - z / (1.0 - std::conj(av) * z));
  }
  return 2.0 * g;
}

/// Minimizes the potential by gradient descent in the metric induced by the
/// conformal factor: the Euclidean gradient is scaled by (1-|a|^2)^2/4, and
/// steps are accepted under an Armijo decrease of 1e-4 * step * |grad|^2.
/// Iterates that reach the boundary are radially retracted.
inline DiscPoint conformal_barycenter_from(const WeightedConfiguration& config,
                                           DiscPoint init,
                                           const SolverOptions& opts = {}) {
  DiscPoint a = init;
  double value = potential(config, a);
  double step = opts.initial_step;
  double grad_norm = 0.0;
  for (std::size_t iter = 0; iter < opts.max_iterations; ++iter) {
    complexd eg = potential_gradient(config, a);
    double scale = (1.0 - std::norm(a.value()));
    scale = scale * scale / 4.0;
    complexd rg = scale * eg;
    grad_norm = std::abs(rg);
    if (grad_norm <= opts.grad_tolerance) return a;

    // Newton polish once the gradient is small: 2x2 Jacobian of the
    // analytic gradient by central differences, accepted only on descent.
    if (grad_norm < 0.5) {
      const double h = 1e-6;
      complexd gxp = potential_gradient(
          config, DiscPoint::clamped(a.value() + complexd(h, 0.0)));
      complexd gxm = potential_gradient(
          config, DiscPoint::clamped(a.value() - complexd(h, 0.0)));
      complexd gyp = potential_gradient(
          config, DiscPoint::clamped(a.value() + complexd(0.0, h)));
      complexd gym = potential_gradient(
          config, DiscPoint::clamped(a.value() - complexd(0.0, h)));
      double j00 = (gxp.real() - gxm.real()) / (2.0 * h);
      double j10 = (gxp.imag() - gxm.imag()) / (2.0 * h);
      double j01 = (gyp.real() - gym.real()) / (2.0 * h);
      double j11 = (gyp.imag() - gym.imag()) / (2.0 * h);
      double det = j00 * j11 - j01 * j10;
      if (std::fabs(det) > 1e-14) {
        double dx = (j11 * eg.real() - j01 * eg.imag()) / det;
        double dy = (-j10 * eg.real() + j00 * eg.imag()) / det;
        DiscPoint trial = DiscPoint::clamped(a.value() - complexd(dx, dy));
        double trial_value = potential(config, trial);
        if (trial_value <= value) {
          a = trial;
          value = trial_value;
          continue;
        }
      }
    }

    step *= 2.0;  // retry larger; Armijo backtracking bounds the growth
    bool accepted = false;
    while (step > 1e-18) {
      DiscPoint trial = DiscPoint::clamped(a.value() - step * rg);
      double trial_value = potential(config, trial);
      if (trial_value <= value - 1e-4 * step * grad_norm * grad_norm) {
        a = trial;
        value = trial_value;
        accepted = true;
        break;
      }
      step *= opts.backtrack_factor;
    }
    if (!accepted) {
      // Line search stalled at machine precision; the iterate is a minimum
      // up to rounding.
      if (grad_norm <= opts.grad_tolerance * 1e3) return a;
      throw SolverError(
          "conformal_barycenter: line search stalled, gradient norm " +
          fmt_double(grad_norm));
    }
  }
  complexd eg = potential_gradient(config, a);
  double scale = (1.0 - std::norm(a.value()));
  scale = scale * scale / 4.0;
  grad_norm = std::abs(scale * eg);
  if (grad_norm <= opts.grad_tolerance) return a;
  throw SolverError("conformal_barycenter: no convergence after " +
                    std::to_string(opts.max_iterations) +
                    " iterations, final iterate (" + fmt_double(a.re()) +
                    ", " + fmt_double(a.im()) + "), gradient norm " +
                    fmt_double(grad_norm));
}

/// Barycenter with the default initialization at the Euclidean weighted mean
/// (interior by convexity). Deterministic for fixed inputs.
inline DiscPoint conformal_barycenter(const WeightedConfiguration& config,
                                      const SolverOptions& opts = {}) {
  complexd mean(0.0, 0.0);
  for (std::size_t i = 0; i < config.size(); ++i) {
    mean += config.weights()[i] * config.points()[i].value();
  }
  return conformal_barycenter_from(config, DiscPoint::clamped(mean), opts);
}

}  // namespace embolic
