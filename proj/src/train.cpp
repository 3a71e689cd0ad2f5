#include "finn/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "finn/errors.hpp"
#include "finn/metrics.hpp"

namespace finn {

double logloss(double prob, std::uint8_t label) { return log_loss(prob, label); }

double logloss_grad(double prob, std::uint8_t label) {
    return prob - static_cast<double>(label);
}

AdamOptimizer::AdamOptimizer(std::vector<Param*> params, double alpha,
                             double beta1, double beta2, double epsilon)
    : params_(std::move(params)),
      alpha_(alpha),
      beta1_(beta1),
      beta2_(beta2),
      epsilon_(epsilon) {
    if (params_.empty())
        throw std::invalid_argument("adam: no parameters to optimize");
    if (!(alpha_ >= 0.0)) throw std::invalid_argument("adam: alpha must be >= 0");
    if (!(beta1_ >= 0.0 && beta1_ < 1.0))
        throw std::invalid_argument("adam: beta1 must lie in [0,1)");
    if (!(beta2_ >= 0.0 && beta2_ < 1.0))
        throw std::invalid_argument("adam: beta2 must lie in [0,1)");
    if (!(epsilon_ > 0.0)) throw std::invalid_argument("adam: epsilon must be > 0");
    slots_.reserve(params_.size());
    for (Param* p : params_) {
        if (p == nullptr) throw std::invalid_argument("adam: null parameter");
        if (p->grad.shape() != p->value.shape())
            throw std::invalid_argument("adam: gradient shape mismatch for '" +
                                        p->name + "'");
        slots_.push_back({Tensor(p->value.shape()), Tensor(p->value.shape())});
    }
}

void AdamOptimizer::update_entry(Param& p, Slot& slot, std::size_t i) {
    const double grad = p.grad[i];
    double& m = slot.m[i];
    double& v = slot.g[i];
    m = beta1_ * m + (1.0 - beta1_) * grad;
    v = beta2_ * v + (1.0 - beta2_) * grad * grad;
    const double m_hat = m / (1.0 - beta1_pow_);
    const double v_hat = v / (1.0 - beta2_pow_);
    p.value[i] -= alpha_ * m_hat / (std::sqrt(v_hat) + epsilon_);
}

void AdamOptimizer::step() {
    ++t_;
    beta1_pow_ *= beta1_;
    beta2_pow_ *= beta2_;
    for (std::size_t pi = 0; pi < params_.size(); ++pi) {
        Param& p = *params_[pi];
        if (p.grad.shape() != p.value.shape())
            throw std::invalid_argument("adam: gradient shape mismatch for '" +
                                        p.name + "'");
        Slot& slot = slots_[pi];
        if (p.row_sparse) {
            std::vector<std::size_t> rows = p.touched;
            std::sort(rows.begin(), rows.end());
            rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
            const std::size_t width = p.row_width();
            for (std::size_t r : rows)
                for (std::size_t c = 0; c < width; ++c)
                    update_entry(p, slot, r * width + c);
        } else {
            for (std::size_t i = 0; i < p.value.size(); ++i)
                update_entry(p, slot, i);
        }
    }
}

void TrainConfig::validate() const {
    if (epochs == 0) throw std::invalid_argument("train config: epochs must be >= 1");
    if (batch_size == 0)
        throw std::invalid_argument("train config: batch_size must be >= 1");
    if (!(alpha >= 0.0))
        throw std::invalid_argument("train config: alpha must be >= 0");
    if (!(beta1 >= 0.0 && beta1 < 1.0))
        throw std::invalid_argument("train config: beta1 must lie in [0,1)");
    if (!(beta2 >= 0.0 && beta2 < 1.0))
        throw std::invalid_argument("train config: beta2 must lie in [0,1)");
    if (!(epsilon > 0.0))
        throw std::invalid_argument("train config: epsilon must be > 0");
}

std::string TrainReport::serialize() const {
    std::string out;
    char buf[160];
    for (const TrainRow& row : rows) {
        std::snprintf(buf, sizeof buf, "%zu\t%.6f\t%.6f\t%.6f\n", row.epoch,
                      row.train_logloss, row.eval_auc, row.eval_logloss);
        out += buf;
    }
    return out;
}

EvalResult evaluate(const Model& g, const Dataset& data) {
    if (data.empty()) throw std::invalid_argument("evaluate: empty dataset");
    ScoredSet scored;
    scored.reserve(data.size());
    for (const EncodedSample& s : data)
        scored.push_back({g.predict(s).probability, s.label});
    return {auc(scored), mean_logloss(scored)};
}

namespace {

void validate_against_model(const Model& g, const Dataset& data,
                            const char* which) {
    const ModelConfig& cfg = g.config();
    for (const EncodedSample& s : data) {
        if (s.indices.size() != cfg.m)
            throw std::invalid_argument(std::string("train: ") + which +
                                        " sample has wrong field count");
        for (std::uint32_t idx : s.indices)
            if (idx >= cfg.n)
                throw std::invalid_argument(std::string("train: ") + which +
                                            " sample index out of range");
        if (s.label > 1)
            throw std::invalid_argument(std::string("train: ") + which +
                                        " sample label out of range");
    }
}

}  // namespace

TrainReport train(Model& g, const Dataset& train_data, const Dataset& eval_data,
                  const TrainConfig& cfg) {
    cfg.validate();
    if (train_data.empty())
        throw std::invalid_argument("train: empty training set");
    if (eval_data.empty()) throw std::invalid_argument("train: empty eval set");
    validate_against_model(g, train_data, "training");
    validate_against_model(g, eval_data, "eval");

    AdamOptimizer opt(g.params(), cfg.alpha, cfg.beta1, cfg.beta2, cfg.epsilon);
    Rng rng(cfg.seed);
    TrainReport report;
    double best_eval = std::numeric_limits<double>::infinity();
    std::size_t epochs_since_best = 0;

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const std::vector<Batch> batches =
            make_batches(train_data, cfg.batch_size, true, rng);
        double loss_sum = 0.0;
        std::size_t seen = 0;
        for (std::size_t bi = 0; bi < batches.size(); ++bi) {
            g.zero_grads();
            const double batch_loss = g.train_batch(batches[bi], rng);
            if (!std::isfinite(batch_loss))
                throw VerificationError(
                    "training diverged: non-finite loss in epoch " +
                    std::to_string(epoch) + ", batch " + std::to_string(bi + 1));
            opt.step();
            loss_sum += batch_loss * static_cast<double>(batches[bi].size());
            seen += batches[bi].size();
            if (cfg.eval_every > 0 && (bi + 1) % cfg.eval_every == 0 &&
                bi + 1 < batches.size()) {
                const EvalResult er = evaluate(g, eval_data);
                report.rows.push_back({epoch, loss_sum / static_cast<double>(seen),
                                       er.auc, er.logloss});
            }
        }
        const EvalResult er = evaluate(g, eval_data);
        report.rows.push_back(
            {epoch, loss_sum / static_cast<double>(seen), er.auc, er.logloss});
        if (cfg.patience > 0) {
            if (er.logloss < best_eval) {
                best_eval = er.logloss;
                epochs_since_best = 0;
            } else if (++epochs_since_best >= cfg.patience) {
                break;
            }
        }
    }
    return report;
}

GradcheckReport gradcheck(Model& g, const EncodedSample& sample, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("gradcheck: step must be > 0");
    g.zero_grads();
    const Prediction p = g.forward_recorded(sample);
    g.backprop(logloss_grad(p.probability, sample.label));

    GradcheckReport report;
    for (Param* par : g.params()) {
        for (std::size_t i = 0; i < par->value.size(); ++i) {
            const double saved = par->value[i];
            par->value[i] = saved + step;
            const double up = log_loss(g.predict(sample).probability, sample.label);
            par->value[i] = saved - step;
            const double down =
                log_loss(g.predict(sample).probability, sample.label);
            par->value[i] = saved;
            const double numeric = (up - down) / (2.0 * step);
            const double analytic = par->grad[i];
            const double rel =
                std::fabs(analytic - numeric) /
                std::max({1.0, std::fabs(analytic), std::fabs(numeric)});
            ++report.checked;
            if (rel > report.max_rel_error) {
                report.max_rel_error = rel;
                report.worst_param = par->name + "[" + std::to_string(i) + "]";
            }
        }
    }
    return report;
}

}  // namespace finn
