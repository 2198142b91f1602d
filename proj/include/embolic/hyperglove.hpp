#pragma once

// Hyperbolic GloVe: embeds a vocabulary into the Poincare disc by minimizing
// the squared-residual factorization objective with a boundary log-penalty,
// by full-batch Riemannian gradient descent. k independent fits build the
// multi-disc table.

#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "embolic/barycenter.hpp"
#include "embolic/corpus.hpp"
#include "embolic/disc_geometry.hpp"
#include "embolic/sampling.hpp"
#include "embolic/util.hpp"

namespace embolic {

struct GloveConfig {
  double alpha = 1.0;           // link steepness
  double lambda_reg = 0.01;     // boundary penalty
  double init_concentration = 10.0;
  double learning_rate = 0.05;
  std::size_t epochs = 300;
  std::uint64_t seed = 42;

  void validate() const {
    if (!(alpha > 0.0) || !(lambda_reg >= 0.0) ||
        !(init_concentration > 1.0) || !(learning_rate > 0.0)) {
      throw DomainError("GloveConfig: invalid parameter");
    }
  }
};

/// token -> multi-disc point map; discs[d][w] is word w's point in disc d.
struct WordEmbeddingTable {
  std::vector<std::string> vocab;
  std::vector<std::vector<DiscPoint>> discs;

  std::size_t k() const { return discs.size(); }

  MultiDiscPoint word_point(std::size_t w) const {
    std::vector<DiscPoint> coords;
    coords.reserve(discs.size());
    for (const auto& disc : discs) coords.push_back(disc[w]);
    return MultiDiscPoint(std::move(coords));
  }
};

/// Link g(x) = 2 e^{-alpha x} / (1 + e^{-alpha x}); g(0) = 1, decreasing to 0.
inline double link(double alpha, double x) {
  double t = std::exp(-alpha * x);
  return 2.0 * t / (1.0 + t);
}

inline double link_derivative(double alpha, double x) {
  double t = std::exp(-alpha * x);
  double denom = (1.0 + t) * (1.0 + t);
  return -2.0 * alpha * t / denom;
}

/// sum_i sum_j (s_ij - g(d(u_i,u_j)))^2 - lambda * sum_i ln(1 - |u_i|^2).
inline double glove_objective(const SimilarityMatrix& s,
                              const std::vector<DiscPoint>& u,
                              const GloveConfig& cfg) {
  if (u.size() != s.n) throw DimensionError("glove_objective: |U| != |V|");
  double obj = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    for (std::size_t j = 0; j < u.size(); ++j) {
      double resid = s.at(i, j) - link(cfg.alpha, disc_distance(u[i], u[j]));
      obj += resid * resid;
    }
    obj -= cfg.lambda_reg * std::log(1.0 - std::norm(u[i].value()));
  }
  return obj;
}

namespace detail {

/// Euclidean gradient (re + i*im) of d(u_i, u_j) with respect to u_i.
/// Singular at coincident points; returns 0 there (the paired residual term
/// has a finite limit along any direction, and the descent step only needs
/// a descent direction).
inline complexd distance_gradient_wrt_first(const DiscPoint& ui,
                                            const DiscPoint& uj) {
  const complexd zi = ui.value();
  const complexd zj = uj.value();
  const complexd delta = zi - zj;
  double d2 = std::norm(delta);
  if (d2 < 1e-60) return complexd(0.0, 0.0);
  double a = 1.0 - std::norm(zi);
  double b = 1.0 - std::norm(zj);
  double gm1 = d2 / (2.0 * a * b);  // gamma - 1, kept exact for small gaps
  // d(gamma)/d(conj(u_i)), doubled into the Euclidean gradient
  complexd dgamma_dconj = delta / (2.0 * a * b) + d2 * zi / (2.0 * a * a * b);
  complexd grad_gamma = 2.0 * dgamma_dconj;
  double acosh_deriv = 1.0 / std::sqrt(gm1 * (gm1 + 2.0));
  return acosh_deriv * grad_gamma;
}

}  // namespace detail

/// Euclidean gradient of the objective with respect to u_i.
inline complexd glove_gradient(const SimilarityMatrix& s,
                               const std::vector<DiscPoint>& u,
                               const GloveConfig& cfg, std::size_t i) {
  if (u.size() != s.n) throw DimensionError("glove_gradient: |U| != |V|");
  complexd g(0.0, 0.0);
  for (std::size_t j = 0; j < u.size(); ++j) {
    if (j == i) continue;  // d(u_i,u_i) = 0 is constant in u_i
    double d = disc_distance(u[i], u[j]);
    double w = link(cfg.alpha, d);
    double resid_sum = (s.at(i, j) - w) + (s.at(j, i) - w);
    complexd dd = detail::distance_gradient_wrt_first(u[i], u[j]);
    g += -resid_sum * link_derivative(cfg.alpha, d) * dd;
  }
  g *= 2.0;
  g += 2.0 * cfg.lambda_reg * u[i].value() /
       (1.0 - std::norm(u[i].value()));
  return g;
}

struct FitResult {
  std::vector<DiscPoint> points;
  std::vector<double> objective_trace;  // value after each accepted step
};

/// One disc fit: Moebius-sampled initialization around the origin, then
/// full-batch Riemannian descent with Armijo backtracking and radial
/// retraction at the boundary. Deterministic for a fixed seed.
inline FitResult fit_disc(const SimilarityMatrix& s, const GloveConfig& cfg) {
  cfg.validate();
  SeededRng rng(cfg.seed);
  MoebiusDistribution init(DiscPoint(0.0, 0.0), cfg.init_concentration);
  std::vector<DiscPoint> u = sample(init, s.n, rng);

  double value = glove_objective(s, u, cfg);
  if (!std::isfinite(value)) {
    throw SolverError("fit_disc: non-finite objective at initialization");
  }
  FitResult result;
  result.objective_trace.push_back(value);

  double step = cfg.learning_rate;
  std::vector<complexd> riem_grad(u.size());
  std::vector<DiscPoint> trial(u.size(), DiscPoint());
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    double grad_norm2 = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      complexd eg = glove_gradient(s, u, cfg, i);
      double scale = 1.0 - std::norm(u[i].value());
      scale = scale * scale / 4.0;
      riem_grad[i] = scale * eg;
      grad_norm2 += std::norm(riem_grad[i]);
    }
    if (grad_norm2 <= 1e-24) break;

    step = std::min(2.0 * step, cfg.learning_rate * 16.0);
    bool accepted = false;
    while (step > 1e-18) {
      for (std::size_t i = 0; i < u.size(); ++i) {
        trial[i] = DiscPoint::clamped(u[i].value() - step * riem_grad[i]);
      }
      double trial_value = glove_objective(s, trial, cfg);
      if (!std::isfinite(trial_value)) {
        throw SolverError("fit_disc: non-finite objective at epoch " +
                          std::to_string(epoch));
      }
      if (trial_value <= value - 1e-4 * step * grad_norm2) {
        u = trial;
        value = trial_value;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // converged to line-search precision
    result.objective_trace.push_back(value);
  }
  result.points = std::move(u);
  return result;
}

/// k independent fits with seeds seed, seed+1, ..., seed+k-1.
inline WordEmbeddingTable fit_embeddings(const SimilarityMatrix& s,
                                         std::size_t k,
                                         const GloveConfig& cfg,
                                         std::vector<std::string> vocab) {
  if (k < 1) throw DimensionError("fit_embeddings: k must be >= 1");
  if (vocab.size() != s.n) {
    throw DimensionError("fit_embeddings: vocab size != |V|");
  }
  WordEmbeddingTable table;
  table.vocab = std::move(vocab);
  for (std::size_t d = 0; d < k; ++d) {
    GloveConfig disc_cfg = cfg;
    disc_cfg.seed = cfg.seed + d;
    try {
      table.discs.push_back(fit_disc(s, disc_cfg).points);
    } catch (const SolverError& e) {
      throw SolverError("fit_embeddings: disc " + std::to_string(d) + ": " +
                        e.what());
    }
  }
  return table;
}

}  // namespace embolic
