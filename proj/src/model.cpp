#include "finn/model.hpp"

#include <cmath>
#include <stdexcept>

#include "finn/errors.hpp"
#include "finn/metrics.hpp"

namespace finn {
namespace {

Tensor flatten(const Tensor& t) {
    return Tensor::from_data({t.size()},
                             std::vector<double>(t.data(), t.data() + t.size()));
}

}  // namespace

Variant parse_variant(const std::string& name) {
    if (name == "lr") return Variant::LR;
    if (name == "fm") return Variant::FM;
    if (name == "fnn") return Variant::FNN;
    if (name == "pnn") return Variant::PNN;
    if (name == "widedeep") return Variant::WideDeep;
    if (name == "deepfm") return Variant::DeepFM;
    if (name == "finn") return Variant::FINN;
    throw std::invalid_argument("unknown model variant '" + name + "'");
}

const char* variant_name(Variant v) {
    switch (v) {
        case Variant::LR: return "lr";
        case Variant::FM: return "fm";
        case Variant::FNN: return "fnn";
        case Variant::PNN: return "pnn";
        case Variant::WideDeep: return "widedeep";
        case Variant::DeepFM: return "deepfm";
        case Variant::FINN: return "finn";
    }
    throw std::logic_error("unknown variant");
}

bool ModelConfig::uses_linear() const {
    switch (variant) {
        case Variant::LR:
        case Variant::FM:
        case Variant::WideDeep:
        case Variant::DeepFM:
        case Variant::FINN:
            return true;
        case Variant::FNN:
        case Variant::PNN:
            return false;
    }
    throw std::logic_error("unknown variant");
}

bool ModelConfig::uses_embeddings() const { return variant != Variant::LR; }

bool ModelConfig::uses_mlp() const {
    switch (variant) {
        case Variant::FNN:
        case Variant::PNN:
        case Variant::WideDeep:
        case Variant::DeepFM:
        case Variant::FINN:
            return true;
        case Variant::LR:
        case Variant::FM:
            return false;
    }
    throw std::logic_error("unknown variant");
}

bool ModelConfig::uses_fm_pairs() const {
    return variant == Variant::FM || variant == Variant::DeepFM;
}

std::size_t ModelConfig::mlp_input_dim() const {
    switch (variant) {
        case Variant::FNN:
        case Variant::WideDeep:
        case Variant::DeepFM:
            return m * k;
        case Variant::PNN:
            return m * k + pair_count(m);
        case Variant::FINN:
            return pair_count(m) * l;
        case Variant::LR:
        case Variant::FM:
            return 0;
    }
    throw std::logic_error("unknown variant");
}

void ModelConfig::validate() const {
    if (n == 0) throw std::invalid_argument("model config: n must be >= 1");
    if (m < 2) throw std::invalid_argument("model config: need at least 2 fields");
    if (uses_embeddings() && k == 0)
        throw std::invalid_argument("model config: k must be >= 1");
    if (variant == Variant::FINN && l == 0)
        throw std::invalid_argument("model config: finn needs l >= 1");
    if (uses_mlp()) {
        if (hidden.empty())
            throw std::invalid_argument(
                "model config: deep variants need at least one hidden layer");
        for (std::size_t width : hidden)
            if (width == 0)
                throw std::invalid_argument("model config: zero-width hidden layer");
    } else {
        if (use_bn)
            throw std::invalid_argument(
                "model config: batch normalization requires a deep variant");
        if (dropout_keep != 1.0)
            throw std::invalid_argument(
                "model config: dropout requires a deep variant");
    }
    if (!(dropout_keep > 0.0 && dropout_keep <= 1.0))
        throw std::invalid_argument("model config: dropout keep must be in (0,1]");
    if (!(embed_low < embed_high))
        throw std::invalid_argument("model config: bad embedding init range");
}

Model::Model(const ModelConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    Rng rng(cfg_.seed);
    if (cfg_.uses_linear()) {
        w0_ = Param("w0", Tensor({1}));
        w_ = Param("linear.w", Tensor({cfg_.n}), /*row_sparse=*/true);
    }
    if (cfg_.uses_embeddings())
        embed_ = Param("embed",
                       uniform_init({cfg_.n, cfg_.k}, cfg_.embed_low,
                                    cfg_.embed_high, rng),
                       /*row_sparse=*/true);
    if (cfg_.uses_interaction_tensor()) {
        const double bound = std::sqrt(6.0 / static_cast<double>(cfg_.k + cfg_.k));
        W_ = Param("interaction.W",
                   uniform_init({cfg_.k, cfg_.k, cfg_.l}, -bound, bound, rng));
    }
    if (cfg_.uses_mlp()) {
        std::size_t d_in = cfg_.mlp_input_dim();
        for (std::size_t i = 0; i < cfg_.hidden.size(); ++i) {
            mlp_.emplace_back("mlp." + std::to_string(i), d_in, cfg_.hidden[i],
                              cfg_.activation, rng);
            d_in = cfg_.hidden[i];
        }
        mlp_.emplace_back("mlp." + std::to_string(cfg_.hidden.size()), d_in, 1,
                          Activation::identity, rng);
        if (cfg_.use_bn) {
            bn_ = BatchNormLayer("bn", cfg_.mlp_input_dim());
            bn_active_ = true;
        }
    }
}

void Model::validate_sample(const EncodedSample& sample) const {
    if (sample.indices.size() != cfg_.m)
        throw std::invalid_argument(
            "sample has " + std::to_string(sample.indices.size()) +
            " fields, model expects " + std::to_string(cfg_.m));
    for (std::uint32_t idx : sample.indices)
        if (idx >= cfg_.n)
            throw std::out_of_range("feature index " + std::to_string(idx) +
                                    " >= n = " + std::to_string(cfg_.n));
    if (sample.label > 1)
        throw std::invalid_argument("label must be 0 or 1");
}

double Model::linear_logit(const EncodedSample& sample) const {
    double s = w0_.value[0];
    for (std::uint32_t idx : sample.indices) s += w_.value[idx];
    return s;
}

double Model::fm_pairwise(const Tensor& E) const {
    const std::size_t m = E.dim(0), k = E.dim(1);
    double pair_sum = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
            for (std::size_t c = 0; c < k; ++c) pair_sum += E(i, c) * E(j, c);

    // Independent route: sum_{i<j} <v_i, v_j> = ((sum v)^2 - sum v^2) / 2.
    double half_square = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        double s = 0.0, sq = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            s += E(i, c);
            sq += E(i, c) * E(i, c);
        }
        half_square += s * s - sq;
    }
    half_square *= 0.5;

    if (!(std::fabs(pair_sum - half_square) <=
          1e-10 * std::max(1.0, std::fabs(pair_sum))))
        throw VerificationError(
            "fm pairwise term: explicit pairs and half-of-squares routes "
            "disagree (" +
            std::to_string(pair_sum) + " vs " + std::to_string(half_square) + ")");
    return pair_sum;
}

void Model::fm_pairwise_backward(const Tensor& E, double dlogit,
                                 Tensor& dE) const {
    const std::size_t m = E.dim(0), k = E.dim(1);
    for (std::size_t c = 0; c < k; ++c) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += E(i, c);
        for (std::size_t i = 0; i < m; ++i)
            dE(i, c) += dlogit * (s - E(i, c));
    }
}

Tensor Model::deep_input_from(const Tensor& E) const {
    switch (cfg_.variant) {
        case Variant::FINN:
            return flatten(bilinear_interaction(E, W_.value));
        case Variant::PNN:
            return concat({flatten(E), inner_product_interaction(E)});
        default:
            return flatten(E);
    }
}

double Model::run_mlp(const Tensor& x, std::vector<DenseCache>* caches) const {
    if (caches) caches->resize(mlp_.size());
    Tensor cur = x;
    for (std::size_t i = 0; i < mlp_.size(); ++i)
        cur = mlp_[i].forward(cur, caches ? &(*caches)[i] : nullptr);
    return cur[0];
}

Tensor Model::mlp_backward(const std::vector<DenseCache>& caches, double dlogit) {
    Tensor up = Tensor::from_data({1}, {dlogit});
    for (std::size_t i = mlp_.size(); i-- > 0;)
        up = mlp_[i].backward(caches[i], up);
    return up;
}

Tensor Model::deep_backward(const Tensor& dx, const Tensor& E) {
    const std::size_t m = cfg_.m, k = cfg_.k;
    Tensor dE({m, k});
    switch (cfg_.variant) {
        case Variant::FINN: {
            Tensor up = Tensor::from_data(
                {pair_count(m), cfg_.l},
                std::vector<double>(dx.data(), dx.data() + dx.size()));
            bilinear_backward(E, W_.value, up, dE, W_.grad);
            break;
        }
        case Variant::PNN: {
            for (std::size_t slot = 0; slot < m * k; ++slot) dE[slot] = dx[slot];
            Tensor up({pair_count(m)});
            for (std::size_t p = 0; p < up.size(); ++p) up[p] = dx[m * k + p];
            inner_product_backward(E, up, dE);
            break;
        }
        default:
            for (std::size_t slot = 0; slot < m * k; ++slot) dE[slot] = dx[slot];
    }
    return dE;
}

void Model::linear_backward(const EncodedSample& sample, double dlogit) {
    w0_.grad[0] += dlogit;
    for (std::uint32_t idx : sample.indices) {
        w_.grad[idx] += dlogit;
        w_.touch(idx);
    }
}

Prediction Model::eval_forward(const EncodedSample& sample, Trace* trace) const {
    validate_sample(sample);
    double logit = 0.0;
    Tensor E;
    if (cfg_.uses_embeddings()) E = embed_lookup(sample.indices, embed_.value);
    if (cfg_.uses_linear()) logit += linear_logit(sample);
    if (cfg_.uses_fm_pairs()) logit += fm_pairwise(E);
    if (cfg_.uses_mlp()) {
        Tensor x = deep_input_from(E);
        const Tensor& normed = bn_active_ ? bn_.forward_eval(x) : x;
        // Dropout is the identity in eval mode.
        std::vector<DenseCache> caches;
        logit += run_mlp(normed, trace ? &caches : nullptr);
        if (trace) {
            trace->deep_input = std::move(x);
            trace->dense = std::move(caches);
        }
    }
    if (trace) {
        trace->sample = sample;
        trace->E = std::move(E);
    }
    return {logit, sigmoid(logit)};
}

Prediction Model::predict(const EncodedSample& sample) const {
    return eval_forward(sample, nullptr);
}

Prediction Model::forward_recorded(const EncodedSample& sample) {
    Trace trace;
    Prediction p = eval_forward(sample, &trace);
    trace_ = std::move(trace);
    return p;
}

void Model::backprop(double dlogit) {
    if (!trace_)
        throw std::logic_error("backprop called without a recorded forward pass");
    Trace trace = std::move(*trace_);
    trace_.reset();

    Tensor dE;
    if (cfg_.uses_embeddings()) dE = Tensor({cfg_.m, cfg_.k});
    if (cfg_.uses_mlp()) {
        Tensor up = mlp_backward(trace.dense, dlogit);
        Tensor dx =
            bn_active_ ? bn_.backward_eval(trace.deep_input, up) : std::move(up);
        Tensor dE_deep = deep_backward(dx, trace.E);
        for (std::size_t slot = 0; slot < dE.size(); ++slot)
            dE[slot] += dE_deep[slot];
    }
    if (cfg_.uses_fm_pairs()) fm_pairwise_backward(trace.E, dlogit, dE);
    if (cfg_.uses_embeddings())
        embed_lookup_backward(trace.sample.indices, dE, embed_);
    if (cfg_.uses_linear()) linear_backward(trace.sample, dlogit);
}

double Model::train_batch(const Batch& batch, Rng& rng) {
    if (batch.size() == 0)
        throw std::invalid_argument("train_batch: empty batch");
    for (const auto& s : batch.samples) validate_sample(s);
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    double total = 0.0;

    if (!cfg_.uses_mlp()) {
        for (const auto& s : batch.samples) {
            Prediction p = forward_recorded(s);
            total += log_loss(p.probability, s.label);
            backprop((p.probability - s.label) * inv_b);
        }
        return total * inv_b;
    }

    const std::size_t B = batch.size(), D = cfg_.mlp_input_dim();
    std::vector<Tensor> embeddings(B);
    Tensor X({B, D});
    for (std::size_t b = 0; b < B; ++b) {
        embeddings[b] = embed_lookup(batch.samples[b].indices, embed_.value);
        Tensor x = deep_input_from(embeddings[b]);
        for (std::size_t d = 0; d < D; ++d) X(b, d) = x[d];
    }

    BatchNormCache bn_cache;
    Tensor Y = bn_active_ ? bn_.forward_train(X, &bn_cache) : X;

    Tensor dY({B, D});
    for (std::size_t b = 0; b < B; ++b) {
        const auto& s = batch.samples[b];
        Tensor y_b({D});
        for (std::size_t d = 0; d < D; ++d) y_b[d] = Y(b, d);

        Tensor mask;
        Tensor dropped =
            dropout_forward(y_b, cfg_.dropout_keep, LayerMode::train, rng, mask);
        std::vector<DenseCache> caches;
        double logit = run_mlp(dropped, &caches);
        if (cfg_.uses_linear()) logit += linear_logit(s);
        if (cfg_.uses_fm_pairs()) logit += fm_pairwise(embeddings[b]);
        const double prob = sigmoid(logit);
        total += log_loss(prob, s.label);
        const double dlogit = (prob - s.label) * inv_b;

        if (cfg_.uses_linear()) linear_backward(s, dlogit);
        if (cfg_.uses_fm_pairs()) {
            Tensor dE_fm({cfg_.m, cfg_.k});
            fm_pairwise_backward(embeddings[b], dlogit, dE_fm);
            embed_lookup_backward(s.indices, dE_fm, embed_);
        }
        Tensor dmlp = mlp_backward(caches, dlogit);
        Tensor ddrop = dropout_backward(dmlp, mask);
        for (std::size_t d = 0; d < D; ++d) dY(b, d) = ddrop[d];
    }

    Tensor dX = bn_active_ ? bn_.backward_train(bn_cache, dY) : std::move(dY);
    for (std::size_t b = 0; b < B; ++b) {
        Tensor dx({D});
        for (std::size_t d = 0; d < D; ++d) dx[d] = dX(b, d);
        Tensor dE = deep_backward(dx, embeddings[b]);
        embed_lookup_backward(batch.samples[b].indices, dE, embed_);
    }
    return total * inv_b;
}

void Model::zero_grads() {
    for (Param* p : params()) p->zero_grad();
}

std::vector<Param*> Model::params() {
    std::vector<Param*> out;
    if (cfg_.uses_linear()) {
        out.push_back(&w0_);
        out.push_back(&w_);
    }
    if (cfg_.uses_embeddings()) out.push_back(&embed_);
    if (cfg_.uses_interaction_tensor()) out.push_back(&W_);
    for (auto& layer : mlp_) {
        out.push_back(&layer.W);
        out.push_back(&layer.b);
    }
    if (bn_active_) {
        out.push_back(&bn_.gamma);
        out.push_back(&bn_.beta);
    }
    return out;
}

std::vector<std::pair<std::string, Tensor*>> Model::state_tensors() {
    std::vector<std::pair<std::string, Tensor*>> out;
    for (Param* p : params()) out.emplace_back(p->name, &p->value);
    if (bn_active_) {
        out.emplace_back("bn.running_mean", &bn_.running_mean);
        out.emplace_back("bn.running_var", &bn_.running_var);
    }
    return out;
}

std::vector<std::pair<std::string, const Tensor*>> Model::state_tensors() const {
    std::vector<std::pair<std::string, const Tensor*>> out;
    for (auto& [name, tensor] : const_cast<Model*>(this)->state_tensors())
        out.emplace_back(name, tensor);
    return out;
}

namespace {

Prediction checked_predict(const Model& g, const EncodedSample& s, Variant v) {
    if (g.config().variant != v)
        throw std::invalid_argument(std::string("model variant is '") +
                                    variant_name(g.config().variant) +
                                    "', expected '" + variant_name(v) + "'");
    return g.predict(s);
}

}  // namespace

Prediction predict_lr(const Model& g, const EncodedSample& s) {
    return checked_predict(g, s, Variant::LR);
}
Prediction predict_fm(const Model& g, const EncodedSample& s) {
    return checked_predict(g, s, Variant::FM);
}
Prediction predict_fnn(const Model& g, const EncodedSample& s) {
    return checked_predict(g, s, Variant::FNN);
}
Prediction predict_pnn(const Model& g, const EncodedSample& s) {
    return checked_predict(g, s, Variant::PNN);
}
Prediction predict_widedeep(const Model& g, const EncodedSample& s) {
    return checked_predict(g, s, Variant::WideDeep);
}
Prediction predict_deepfm(const Model& g, const EncodedSample& s) {
    return checked_predict(g, s, Variant::DeepFM);
}
Prediction predict_finn(const Model& g, const EncodedSample& s) {
    return checked_predict(g, s, Variant::FINN);
}

}  // namespace finn
