#pragma once

// Model assembly and prediction: per-disc epicenter and Moebius correction,
// class boundary directions, Poisson-kernel scoring averaged over discs,
// temperature softmax, top-k evaluation, confidence reporting and the
// emotion co-occurrence matrix.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <string>
#include <vector>

#include "embolic/attention.hpp"
#include "embolic/barycenter.hpp"
#include "embolic/corpus.hpp"
#include "embolic/disc_geometry.hpp"
#include "embolic/hyperglove.hpp"
#include "embolic/util.hpp"

namespace embolic {

/// Everything needed for prediction.
struct TrainedModel {
  WordEmbeddingTable table;
  AttentionParams attention;
  std::vector<MoebiusTransform> corrections;        // one per disc
  std::vector<std::vector<BoundaryDirection>> directions;  // [disc][emotion]
  EmotionCatalog catalog = EmotionCatalog::goemotions();
  double temperature = 0.05;
  SolverOptions solver;

  void validate() const {
    const std::size_t k = table.k();
    if (corrections.size() != k || directions.size() != k) {
      throw DimensionError("TrainedModel: per-disc field size mismatch");
    }
    for (const auto& row : directions) {
      if (row.size() != catalog.size()) {
        throw DimensionError("TrainedModel: directions/catalog mismatch");
      }
    }
    if (!(temperature > 0.0)) {
      throw DomainError("TrainedModel: temperature must be > 0");
    }
  }
};

struct ScoreVector {
  std::vector<double> scores;  // pre-softmax, > 0
  std::vector<double> probs;   // softmax(scores / T)
};

struct AccuracyReport {
  std::size_t n = 0;
  double top1 = 0.0;
  double top3 = 0.0;
  double top5 = 0.0;
};

struct ConfidenceReport {
  double threshold = 0.20;
  std::size_t secure_correct = 0;
  std::size_t secure_wrong = 0;
  std::size_t insecure = 0;
};

struct Prediction {
  std::string text_id;
  std::size_t true_label = 0;
  std::vector<double> probs;
  std::vector<std::size_t> top5;  // emotion indices, best first
};

/// Unweighted conformal barycenter of one disc's pooled training points.
/// The correction transform is the theta = 0 map with a = epicenter.
inline DiscPoint compute_epicenter(const std::vector<DiscPoint>& barycenters,
                                   const SolverOptions& opts = {}) {
  return conformal_barycenter(WeightedConfiguration(barycenters), opts);
}

/// psi_j = arg(sum_{k in class j} r_k^2 e^{i phi_k}): the modulus-squared
/// weighted circular mean of the class's corrected points.
inline std::vector<BoundaryDirection> fit_class_directions(
    const std::vector<DiscPoint>& corrected_points,
    const std::vector<std::size_t>& labels, std::size_t e_count) {
  if (corrected_points.size() != labels.size()) {
    throw DimensionError("fit_class_directions: size mismatch");
  }
  std::vector<complexd> resultant(e_count, complexd(0.0, 0.0));
  std::vector<bool> seen(e_count, false);
  for (std::size_t i = 0; i < corrected_points.size(); ++i) {
    if (labels[i] >= e_count) {
      throw DomainError("fit_class_directions: label out of range");
    }
    const complexd z = corrected_points[i].value();
    double r2 = std::norm(z);
    resultant[labels[i]] += r2 * std::polar(1.0, std::arg(z));
    seen[labels[i]] = true;
  }
  std::vector<BoundaryDirection> out;
  out.reserve(e_count);
  for (std::size_t j = 0; j < e_count; ++j) {
    if (!seen[j]) {
      throw DomainError("fit_class_directions: emotion " + std::to_string(j) +
                        " has no training points");
    }
    if (std::abs(resultant[j]) < 1e-12) {
      throw DomainError("fit_class_directions: emotion " + std::to_string(j) +
                        " has an undefined direction (balanced class)");
    }
    out.emplace_back(std::arg(resultant[j]));
  }
  return out;
}

inline std::vector<double> softmax_with_temperature(
    const std::vector<double>& scores, double temperature) {
  std::vector<double> probs(scores.size());
  double max_s = *std::max_element(scores.begin(), scores.end());
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    probs[i] = std::exp((scores[i] - max_s) / temperature);
    total += probs[i];
  }
  for (double& p : probs) p /= total;
  return probs;
}

/// Scores a pooled multi-disc point that is already computed: applies each
/// disc's correction, evaluates the Poisson kernel against every direction,
/// averages over discs, then softmaxes at the model temperature.
inline ScoreVector score_pooled(const TrainedModel& model,
                                const MultiDiscPoint& pooled) {
  const std::size_t e_count = model.catalog.size();
  ScoreVector sv;
  sv.scores.assign(e_count, 0.0);
  for (std::size_t d = 0; d < model.table.k(); ++d) {
    DiscPoint corrected = model.corrections[d].apply(pooled[d]);
    for (std::size_t j = 0; j < e_count; ++j) {
      sv.scores[j] += poisson_score(corrected, model.directions[d][j]);
    }
  }
  for (double& s : sv.scores) s /= static_cast<double>(model.table.k());
  sv.probs = softmax_with_temperature(sv.scores, model.temperature);
  return sv;
}

inline ScoreVector score_message(const TrainedModel& model,
                                 const MessageEmbedding& msg) {
  MultiDiscPoint pooled =
      message_representation(model.attention, msg, model.table.k(), model.solver);
  return score_pooled(model, pooled);
}

/// Emotion indices sorted by descending probability; ties broken by lower
/// emotion index.
inline std::vector<std::size_t> rank_emotions(const std::vector<double>& probs) {
  std::vector<std::size_t> idx(probs.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return probs[a] > probs[b];
  });
  return idx;
}

inline AccuracyReport evaluate(const std::vector<Prediction>& predictions) {
  if (predictions.empty()) throw DimensionError("evaluate: empty test set");
  AccuracyReport report;
  report.n = predictions.size();
  std::size_t hits1 = 0, hits3 = 0, hits5 = 0;
  for (const auto& p : predictions) {
    auto ranked = rank_emotions(p.probs);
    for (std::size_t m = 0; m < std::min<std::size_t>(5, ranked.size()); ++m) {
      if (ranked[m] == p.true_label) {
        if (m < 1) ++hits1;
        if (m < 3) ++hits3;
        if (m < 5) ++hits5;
        break;
      }
    }
  }
  report.top1 = double(hits1) / double(report.n);
  report.top3 = double(hits3) / double(report.n);
  report.top5 = double(hits5) / double(report.n);
  return report;
}

inline ConfidenceReport confidence_report(
    const std::vector<Prediction>& predictions, double threshold = 0.20) {
  ConfidenceReport report;
  report.threshold = threshold;
  for (const auto& p : predictions) {
    auto ranked = rank_emotions(p.probs);
    double top_prob = p.probs[ranked[0]];
    if (top_prob < threshold) {
      ++report.insecure;
    } else if (ranked[0] == p.true_label) {
      ++report.secure_correct;
    } else {
      ++report.secure_wrong;
    }
  }
  return report;
}

/// Entry (i, j) counts test instances whose top-5 contains both i and j;
/// the diagonal counts instances whose top-5 contains i.
inline std::vector<std::vector<double>> emotion_cooccurrence(
    const std::vector<Prediction>& predictions, std::size_t e_count) {
  std::vector<std::vector<double>> counts(e_count,
                                          std::vector<double>(e_count, 0.0));
  for (const auto& p : predictions) {
    for (std::size_t a : p.top5) {
      for (std::size_t b : p.top5) counts.at(a).at(b) += 1.0;
    }
  }
  return counts;
}

}  // namespace embolic
