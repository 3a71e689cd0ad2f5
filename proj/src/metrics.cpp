#include "finn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace finn {

double clamp_probability(double p) {
    if (std::isnan(p)) return p;  // keep divergence visible to callers
    return std::min(1.0 - kProbEps, std::max(kProbEps, p));
}

double log_loss(double p, std::uint8_t label) {
    p = clamp_probability(p);
    return label ? -std::log(p) : -std::log(1.0 - p);
}

double auc(const ScoredSet& set) {
    std::size_t positives = 0;
    for (const auto& s : set) positives += s.label ? 1 : 0;
    const std::size_t negatives = set.size() - positives;
    if (positives == 0 || negatives == 0)
        throw std::invalid_argument(
            "auc needs both classes (got " + std::to_string(positives) +
            " positives out of " + std::to_string(set.size()) + ")");

    for (const auto& s : set)
        if (!std::isfinite(s.score))
            throw std::invalid_argument("auc: non-finite score");

    ScoredSet sorted = set;
    std::sort(sorted.begin(), sorted.end(),
              [](const Scored& a, const Scored& b) { return a.score < b.score; });

    // Midrank sum over positives: tied scores share the average rank, which
    // gives each tied (pos, neg) pair exactly 1/2 credit.
    double pos_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i + 1;
        while (j < sorted.size() && sorted[j].score == sorted[i].score) ++j;
        double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k)
            if (sorted[k].label) pos_rank_sum += midrank;
        i = j;
    }
    double p = static_cast<double>(positives);
    return (pos_rank_sum - p * (p + 1.0) / 2.0) /
           (p * static_cast<double>(negatives));
}

double mean_logloss(const ScoredSet& set) {
    if (set.empty()) throw std::invalid_argument("mean_logloss of empty set");
    double sum = 0.0;
    for (const auto& s : set) sum += log_loss(s.score, s.label);
    return sum / static_cast<double>(set.size());
}

}  // namespace finn
