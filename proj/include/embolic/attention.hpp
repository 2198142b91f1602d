#pragma once

// Message pooling: per-word attention logits from a linear projection of the
// flattened multi-disc coordinates, softmax weights, and weighted conformal
// barycenters per disc.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "embolic/barycenter.hpp"
#include "embolic/disc_geometry.hpp"
#include "embolic/hyperglove.hpp"
#include "embolic/util.hpp"

namespace embolic {

/// One weight per real/imaginary coordinate across the k discs, plus a bias;
/// 2k + 1 parameters in total.
struct AttentionParams {
  std::vector<double> projection;
  double bias = 0.0;

  std::size_t k() const { return projection.size() / 2; }
};

/// The in-vocabulary words of one message, in order. A message whose tokens
/// are all out-of-vocabulary is represented by the origin in every disc and
/// flagged.
struct MessageEmbedding {
  std::vector<MultiDiscPoint> words;
  bool all_oov = false;
};

/// Looks tokens up in the table, dropping out-of-vocabulary ones.
inline MessageEmbedding embed_message(const WordEmbeddingTable& table,
                                      const std::vector<std::string>& tokens) {
  MessageEmbedding msg;
  for (const auto& tok : tokens) {
    auto it = std::lower_bound(table.vocab.begin(), table.vocab.end(), tok);
    if (it != table.vocab.end() && *it == tok) {
      msg.words.push_back(
          table.word_point(static_cast<std::size_t>(it - table.vocab.begin())));
    }
  }
  if (msg.words.empty()) msg.all_oov = true;
  return msg;
}

/// Softmax over per-word logits projection . flatten(coords) + bias.
inline std::vector<double> attention_weights(const AttentionParams& params,
                                             const MessageEmbedding& msg) {
  if (msg.words.empty()) {
    throw DimensionError("attention_weights: empty message");
  }
  std::vector<double> logits;
  logits.reserve(msg.words.size());
  for (const auto& word : msg.words) {
    if (params.projection.size() != 2 * word.k()) {
      throw DimensionError("attention_weights: projection dimension mismatch");
    }
    double t = params.bias;
    for (std::size_t d = 0; d < word.k(); ++d) {
      t += params.projection[2 * d] * word[d].re();
      t += params.projection[2 * d + 1] * word[d].im();
    }
    logits.push_back(t);
  }
  double max_logit = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double& t : logits) {
    t = std::exp(t - max_logit);
    total += t;
  }
  for (double& t : logits) t /= total;
  return logits;
}

/// Pools with the given weights: one weighted conformal barycenter per disc.
inline MultiDiscPoint pool_with_weights(const MessageEmbedding& msg,
                                        const std::vector<double>& weights,
                                        const SolverOptions& opts = {}) {
  const std::size_t k = msg.words.front().k();
  std::vector<DiscPoint> pooled;
  pooled.reserve(k);
  for (std::size_t d = 0; d < k; ++d) {
    std::vector<DiscPoint> points;
    points.reserve(msg.words.size());
    for (const auto& word : msg.words) points.push_back(word[d]);
    pooled.push_back(
        conformal_barycenter(WeightedConfiguration(points, weights), opts));
  }
  return MultiDiscPoint(std::move(pooled));
}

/// The message representation: attention weights shared across discs,
/// weighted conformal barycenter in each disc. All-OOV messages map to the
/// origin of every disc.
inline MultiDiscPoint message_representation(const AttentionParams& params,
                                             const MessageEmbedding& msg,
                                             std::size_t table_k,
                                             const SolverOptions& opts = {}) {
  if (msg.all_oov || msg.words.empty()) {
    return MultiDiscPoint(std::vector<DiscPoint>(table_k, DiscPoint()));
  }
  return pool_with_weights(msg, attention_weights(params, msg), opts);
}

}  // namespace embolic
