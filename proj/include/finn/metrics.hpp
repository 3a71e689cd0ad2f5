#pragma once

#include <cstdint>
#include <vector>

namespace finn {

/// (score, label) pairs of one evaluation pass. Scores may be probabilities
/// or logits for auc(); mean_logloss() expects probabilities.
struct Scored {
    double score = 0.0;
    std::uint8_t label = 0;
};

using ScoredSet = std::vector<Scored>;

/// Probabilities are kept away from {0,1} so log loss stays finite.
constexpr double kProbEps = 1e-12;

double clamp_probability(double p);

/// -(y log p + (1-y) log(1-p)) with p clamped.
double log_loss(double p, std::uint8_t label);

/// Mann-Whitney AUC: fraction of (positive, negative) pairs ranked correctly,
/// ties worth 1/2. Sort-and-midrank, O(N log N). Throws unless both classes
/// are present (a single-class AUC is undefined, not 0.5).
double auc(const ScoredSet& set);

/// Arithmetic mean of per-sample log loss. Throws on an empty set.
double mean_logloss(const ScoredSet& set);

}  // namespace finn
