#pragma once

// Contrastive training of the attention parameters: positive pairs pulled
// together, negative pairs pushed apart, boundary log-penalty on pooled
// barycenters. Gradients by central finite differences over the (2k+1)
// parameters.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "embolic/attention.hpp"
#include "embolic/disc_geometry.hpp"
#include "embolic/sampling.hpp"
#include "embolic/util.hpp"

namespace embolic {

struct TrainConfig {
  std::size_t batch_size = 64;
  std::size_t epochs = 50;
  double learning_rate = 0.05;
  double lambda_boundary = 0.01;
  std::size_t pairs_per_batch = 64;
  double fd_step = 1e-4;
  std::uint64_t seed = 42;

  void validate() const {
    if (batch_size < 2 || pairs_per_batch < 1 || !(learning_rate > 0.0) ||
        !(fd_step > 0.0) || !(lambda_boundary >= 0.0)) {
      throw DomainError("TrainConfig: invalid parameter");
    }
  }
};

struct IndexPair {
  std::size_t first;
  std::size_t second;
};

struct PairSet {
  std::vector<IndexPair> positives;  // same label
  std::vector<IndexPair> negatives;  // different labels
};

/// Up to pairs_per_batch positive and negative pairs drawn uniformly without
/// replacement from the eligible pairs of the batch.
inline PairSet sample_pairs(const std::vector<std::size_t>& labels,
                            const TrainConfig& cfg, SeededRng& rng) {
  std::vector<IndexPair> pos, neg;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (std::size_t j = i + 1; j < labels.size(); ++j) {
      (labels[i] == labels[j] ? pos : neg).push_back({i, j});
    }
  }
  auto draw = [&](std::vector<IndexPair>& pool) {
    std::size_t take = std::min(cfg.pairs_per_batch, pool.size());
    for (std::size_t j = 0; j < take; ++j) {
      std::size_t r =
          j + static_cast<std::size_t>(rng.uniform() * double(pool.size() - j));
      if (r >= pool.size()) r = pool.size() - 1;
      std::swap(pool[j], pool[r]);
    }
    pool.resize(take);
  };
  draw(pos);
  draw(neg);
  return {std::move(pos), std::move(neg)};
}

/// Mean of per-disc squared moduli, the multi-disc reading of |b|^2.
inline double mean_squared_modulus(const MultiDiscPoint& b) {
  double sum = 0.0;
  for (std::size_t d = 0; d < b.k(); ++d) sum += std::norm(b[d].value());
  return sum / static_cast<double>(b.k());
}

/// (1/|P|) sum rho_h(b_i,b_j) - (1/|N|) sum rho_h(b_i,b_j)
/// - lambda (1/B) sum log(1 - |b_i|^2). Empty pair sets drop their term.
inline double contrastive_loss(const std::vector<MultiDiscPoint>& barycenters,
                               const PairSet& pairs, double lambda) {
  double loss = 0.0;
  if (!pairs.positives.empty()) {
    double sum = 0.0;
    for (const auto& [i, j] : pairs.positives) {
      sum += multidisc_distance(barycenters.at(i), barycenters.at(j));
    }
    loss += sum / static_cast<double>(pairs.positives.size());
  }
  if (!pairs.negatives.empty()) {
    double sum = 0.0;
    for (const auto& [i, j] : pairs.negatives) {
      sum += multidisc_distance(barycenters.at(i), barycenters.at(j));
    }
    loss -= sum / static_cast<double>(pairs.negatives.size());
  }
  if (lambda != 0.0 && !barycenters.empty()) {
    double sum = 0.0;
    for (const auto& b : barycenters) {
      double m2 = mean_squared_modulus(b);
      if (m2 >= 1.0) throw DomainError("contrastive_loss: boundary point");
      sum += std::log(1.0 - m2);
    }
    loss -= lambda * sum / static_cast<double>(barycenters.size());
  }
  return loss;
}

struct LossTraceEntry {
  std::size_t epoch;
  std::size_t batch;
  double loss;
};

struct TrainingResult {
  AttentionParams params;
  std::vector<LossTraceEntry> trace;
};

namespace detail {

/// Batch loss for a parameter vector: pool every message, evaluate the
/// contrastive loss on the fixed pair set.
inline double batch_loss(const AttentionParams& params,
                         const std::vector<MessageEmbedding>& msgs,
                         const PairSet& pairs, double lambda, std::size_t k,
                         const SolverOptions& opts) {
  std::vector<MultiDiscPoint> barys;
  barys.reserve(msgs.size());
  for (const auto& m : msgs) {
    barys.push_back(message_representation(params, m, k, opts));
  }
  return contrastive_loss(barys, pairs, lambda);
}

}  // namespace detail

/// Trains the attention parameters. Initialization: seeded normal * 0.01
/// projection, zero bias. Batches are label-stratified (round-robin over
/// seeded per-label shuffles) so most batches contain positive pairs.
/// Deterministic for a fixed seed.
inline TrainingResult train_attention(
    const std::vector<MessageEmbedding>& messages,
    const std::vector<std::size_t>& labels, std::size_t k,
    const TrainConfig& cfg, const SolverOptions& solver_opts = {}) {
  cfg.validate();
  if (messages.empty() || messages.size() != labels.size()) {
    throw DimensionError("train_attention: bad training set");
  }
  SeededRng rng(cfg.seed);
  TrainingResult result;
  result.params.projection.resize(2 * k);
  for (double& w : result.params.projection) w = 0.01 * rng.normal();
  result.params.bias = 0.0;

  const std::size_t n_params = 2 * k + 1;
  auto get_param = [&](AttentionParams& p, std::size_t idx) -> double& {
    return idx < 2 * k ? p.projection[idx] : p.bias;
  };

  std::size_t max_label = *std::max_element(labels.begin(), labels.end());
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    // label-stratified order: shuffle within each label, then round-robin
    std::vector<std::vector<std::size_t>> by_label(max_label + 1);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      by_label[labels[i]].push_back(i);
    }
    for (auto& group : by_label) {
      for (std::size_t j = 0; j + 1 < group.size(); ++j) {
        std::size_t r = j + static_cast<std::size_t>(
                                rng.uniform() * double(group.size() - j));
        if (r >= group.size()) r = group.size() - 1;
        std::swap(group[j], group[r]);
      }
    }
    std::vector<std::size_t> order;
    order.reserve(labels.size());
    for (std::size_t round = 0; order.size() < labels.size(); ++round) {
      for (const auto& group : by_label) {
        if (round < group.size()) order.push_back(group[round]);
      }
    }

    for (std::size_t start = 0, batch_id = 0; start < order.size();
         start += cfg.batch_size, ++batch_id) {
      std::size_t stop = std::min(start + cfg.batch_size, order.size());
      if (stop - start < 2) break;
      std::vector<MessageEmbedding> batch_msgs;
      std::vector<std::size_t> batch_labels;
      for (std::size_t i = start; i < stop; ++i) {
        batch_msgs.push_back(messages[order[i]]);
        batch_labels.push_back(labels[order[i]]);
      }
      PairSet pairs = sample_pairs(batch_labels, cfg, rng);

      double loss = detail::batch_loss(result.params, batch_msgs, pairs,
                                       cfg.lambda_boundary, k, solver_opts);
      if (!std::isfinite(loss)) {
        throw SolverError("train_attention: non-finite loss at epoch " +
                          std::to_string(epoch) + ", batch " +
                          std::to_string(batch_id));
      }
      result.trace.push_back({epoch, batch_id, loss});

      // central finite differences over the full parameter vector
      std::vector<double> grad(n_params);
      for (std::size_t p = 0; p < n_params; ++p) {
        AttentionParams plus = result.params;
        AttentionParams minus = result.params;
        get_param(plus, p) += cfg.fd_step;
        get_param(minus, p) -= cfg.fd_step;
        double lp = detail::batch_loss(plus, batch_msgs, pairs,
                                       cfg.lambda_boundary, k, solver_opts);
        double lm = detail::batch_loss(minus, batch_msgs, pairs,
                                       cfg.lambda_boundary, k, solver_opts);
        grad[p] = (lp - lm) / (2.0 * cfg.fd_step);
      }
      for (std::size_t p = 0; p < n_params; ++p) {
        get_param(result.params, p) -= cfg.learning_rate * grad[p];
      }
    }
  }
  return result;
}

}  // namespace embolic
