#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "finn/data.hpp"
#include "finn/layers.hpp"

namespace finn {

enum class Variant { LR, FM, FNN, PNN, WideDeep, DeepFM, FINN };

Variant parse_variant(const std::string& name);
const char* variant_name(Variant v);

struct ModelConfig {
    Variant variant = Variant::FINN;
    std::size_t n = 0;  // total feature count
    std::size_t m = 0;  // field count
    std::size_t k = 10;  // embedding dimension
    std::size_t l = 10;  // interaction vector dimension (FINN only)
    std::vector<std::size_t> hidden;
    Activation activation = Activation::relu;
    double dropout_keep = 1.0;  // 1.0 disables dropout
    bool use_bn = false;
    double embed_low = -0.01;
    double embed_high = 0.01;
    std::uint64_t seed = 1;

    bool uses_linear() const;
    bool uses_embeddings() const;
    bool uses_interaction_tensor() const { return variant == Variant::FINN; }
    bool uses_mlp() const;
    bool uses_fm_pairs() const;
    std::size_t mlp_input_dim() const;
    void validate() const;

    bool operator==(const ModelConfig&) const = default;
};

struct Prediction {
    double logit = 0.0;
    double probability = 0.5;
};

/// One configured model variant: shared parameter store plus the
/// forward/backward composition for prediction, per-sample gradients, and
/// batch-mode training (train-mode dropout and batch-coupled BN).
class Model {
public:
    explicit Model(const ModelConfig& cfg);

    const ModelConfig& config() const { return cfg_; }

    /// Eval-mode prediction: dropout disabled, BN on running statistics.
    Prediction predict(const EncodedSample& sample) const;

    /// Eval-mode forward that records the computation for backprop().
    Prediction forward_recorded(const EncodedSample& sample);

    /// Accumulate d(loss)/d(param) for the recorded sample given
    /// d(loss)/d(logit). Throws unless a forward was recorded; consumes the
    /// recording.
    void backprop(double dlogit);

    /// Forward+backward over a batch in train mode (dropout masks drawn from
    /// rng, BN on joint batch statistics). Accumulates batch-mean gradients
    /// and returns the batch-mean log loss.
    double train_batch(const Batch& batch, Rng& rng);

    void zero_grads();

    /// Trainable parameters of the active variant, in a stable order.
    std::vector<Param*> params();

    /// Every persistent tensor (parameters plus BN running statistics),
    /// keyed by name — the checkpoint payload.
    std::vector<std::pair<std::string, Tensor*>> state_tensors();
    std::vector<std::pair<std::string, const Tensor*>> state_tensors() const;

    bool has_batchnorm() const { return bn_active_; }
    const BatchNormLayer& batchnorm() const { return bn_; }

private:
    struct Trace {
        EncodedSample sample;
        Tensor E;           // m x k field embeddings
        Tensor deep_input;  // MLP-path input before BN
        std::vector<DenseCache> dense;
    };

    void validate_sample(const EncodedSample& sample) const;
    double linear_logit(const EncodedSample& sample) const;
    /// FM pairwise term, computed by explicit pairs and by the
    /// half-of-squares identity; the two routes must agree.
    double fm_pairwise(const Tensor& E) const;
    Tensor deep_input_from(const Tensor& E) const;
    double run_mlp(const Tensor& x, std::vector<DenseCache>* caches) const;
    Tensor mlp_backward(const std::vector<DenseCache>& caches, double dlogit);
    /// Gradient of the MLP-path input w.r.t. embeddings; accumulates the
    /// interaction-tensor gradient for FINN. Returns dE (m x k).
    Tensor deep_backward(const Tensor& dx, const Tensor& E);
    void linear_backward(const EncodedSample& sample, double dlogit);
    void fm_pairwise_backward(const Tensor& E, double dlogit, Tensor& dE) const;
    Prediction eval_forward(const EncodedSample& sample, Trace* trace) const;

    ModelConfig cfg_;
    Param w0_;     // [1]
    Param w_;      // [n], row-sparse
    Param embed_;  // [n, k], row-sparse
    Param W_;      // [k, k, l]
    std::vector<DenseLayer> mlp_;
    BatchNormLayer bn_;
    bool bn_active_ = false;
    std::optional<Trace> trace_;
};

// Variant-checked entry points: throw invalid_argument on a model of any
// other variant.
Prediction predict_lr(const Model& g, const EncodedSample& s);
Prediction predict_fm(const Model& g, const EncodedSample& s);
Prediction predict_fnn(const Model& g, const EncodedSample& s);
Prediction predict_pnn(const Model& g, const EncodedSample& s);
Prediction predict_widedeep(const Model& g, const EncodedSample& s);
Prediction predict_deepfm(const Model& g, const EncodedSample& s);
Prediction predict_finn(const Model& g, const EncodedSample& s);

}  // namespace finn
