#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "finn/data.hpp"
#include "finn/model.hpp"

namespace finn {

/// Cross-entropy on a clamped probability, and its derivative taken through
/// the sigmoid (d loss / d logit).
double logloss(double prob, std::uint8_t label);
double logloss_grad(double prob, std::uint8_t label);

/// Adam with bias-corrected moments:
///   M_t = b1*M + (1-b1)*g,  G_t = b2*G + (1-b2)*g^2,
///   theta -= alpha * (M_t/(1-b1^t)) / (sqrt(G_t/(1-b2^t)) + eps).
/// Row-sparse parameters are updated lazily: a step touches only the rows the
/// batch touched, leaving the moments of the other rows undecayed, while the
/// bias-correction exponent t stays global.
class AdamOptimizer {
public:
    explicit AdamOptimizer(std::vector<Param*> params, double alpha,
                           double beta1 = 0.9, double beta2 = 0.99,
                           double epsilon = 1e-8);

    /// Consume the currently accumulated gradients; advances t by exactly 1.
    void step();

    std::uint64_t steps() const { return t_; }

private:
    struct Slot {
        Tensor m;  // first moment
        Tensor g;  // second moment
    };

    void update_entry(Param& p, Slot& slot, std::size_t i);

    std::vector<Param*> params_;
    std::vector<Slot> slots_;
    double alpha_, beta1_, beta2_, epsilon_;
    std::uint64_t t_ = 0;
    double beta1_pow_ = 1.0;  // beta1^t, tracked incrementally
    double beta2_pow_ = 1.0;
};

struct TrainConfig {
    std::size_t epochs = 1;
    std::size_t batch_size = 256;
    double alpha = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.99;
    double epsilon = 1e-8;
    std::uint64_t seed = 1;
    std::size_t patience = 0;    // early stop after this many epochs without
                                 // eval-logloss improvement; 0 disables
    std::size_t eval_every = 0;  // extra eval rows every this many batches;
                                 // 0 disables
    void validate() const;
};

struct TrainRow {
    std::size_t epoch = 0;
    double train_logloss = 0.0;
    double eval_auc = 0.0;
    double eval_logloss = 0.0;

    bool operator==(const TrainRow&) const = default;
};

struct TrainReport {
    std::vector<TrainRow> rows;

    /// One `epoch<TAB>train_logloss<TAB>eval_auc<TAB>eval_logloss` line per
    /// row.
    std::string serialize() const;

    bool operator==(const TrainReport&) const = default;
};

struct EvalResult {
    double auc = 0.0;
    double logloss = 0.0;
};

/// Eval-mode AUC and mean log loss over a dataset.
EvalResult evaluate(const Model& g, const Dataset& data);

/// Seeded mini-batch training: per epoch, shuffle, then for each batch clear
/// gradients, accumulate the batch-mean gradient in train mode, and apply one
/// Adam step. Emits one report row per epoch (plus mid-epoch rows when
/// eval_every is set). A non-finite batch loss aborts with VerificationError.
TrainReport train(Model& g, const Dataset& train_data, const Dataset& eval_data,
                  const TrainConfig& cfg);

struct GradcheckReport {
    double max_rel_error = 0.0;
    std::string worst_param;  // e.g. "mlp.0.W[17]"
    std::size_t checked = 0;  // scalar parameters examined
};

/// Central-difference audit of backprop on one sample in eval mode: compares
/// (L(t+h)-L(t-h))/2h against the recorded gradient for every scalar
/// parameter, where L is the log loss at the sample's label.
GradcheckReport gradcheck(Model& g, const EncodedSample& sample,
                          double step = 1e-5);

}  // namespace finn
