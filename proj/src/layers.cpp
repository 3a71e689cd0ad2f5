#include "finn/layers.hpp"

#include <cmath>
#include <stdexcept>

namespace finn {
namespace {

void check_dims(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

double activation_apply(Activation a, double z) {
    switch (a) {
        case Activation::identity: return z;
        case Activation::relu: return relu(z);
        case Activation::sigmoid: return sigmoid(z);
        case Activation::tanh: return std::tanh(z);
    }
    throw std::logic_error("unknown activation");
}

// Derivative in terms of pre-activation z and output y.
double activation_derivative(Activation a, double z, double y) {
    switch (a) {
        case Activation::identity: return 1.0;
        case Activation::relu: return z > 0.0 ? 1.0 : 0.0;
        case Activation::sigmoid: return y * (1.0 - y);
        case Activation::tanh: return 1.0 - y * y;
    }
    throw std::logic_error("unknown activation");
}

}  // namespace

void Param::zero_grad() {
    if (row_sparse) {
        const std::size_t width = row_width();
        for (std::size_t r : touched) {
            double* g = grad.data() + r * width;
            for (std::size_t c = 0; c < width; ++c) g[c] = 0.0;
        }
        touched.clear();
    } else {
        grad.fill(0.0);
    }
}

Activation parse_activation(const std::string& name) {
    if (name == "identity") return Activation::identity;
    if (name == "relu") return Activation::relu;
    if (name == "sigmoid") return Activation::sigmoid;
    if (name == "tanh") return Activation::tanh;
    throw std::invalid_argument("unknown activation '" + name + "'");
}

const char* activation_name(Activation a) {
    switch (a) {
        case Activation::identity: return "identity";
        case Activation::relu: return "relu";
        case Activation::sigmoid: return "sigmoid";
        case Activation::tanh: return "tanh";
    }
    throw std::logic_error("unknown activation");
}

// ---------------------------------------------------------------------------
// Embedding lookup

Tensor embed_lookup(const std::vector<std::uint32_t>& indices,
                    const Tensor& table) {
    check_dims(table.rank() == 2, "embed_lookup: table must be n x k");
    const std::size_t k = table.dim(1);
    Tensor out({indices.size(), k});
    for (std::size_t j = 0; j < indices.size(); ++j) {
        if (indices[j] >= table.dim(0))
            throw std::out_of_range("embed_lookup: index " +
                                    std::to_string(indices[j]) +
                                    " >= table rows " +
                                    std::to_string(table.dim(0)));
        const double* src = table.data() + indices[j] * k;
        double* dst = out.data() + j * k;
        for (std::size_t c = 0; c < k; ++c) dst[c] = src[c];
    }
    return out;
}

void embed_lookup_backward(const std::vector<std::uint32_t>& indices,
                           const Tensor& upstream, Param& table) {
    check_dims(upstream.rank() == 2 && upstream.dim(0) == indices.size() &&
                   upstream.dim(1) == table.value.dim(1),
               "embed_lookup_backward: upstream shape mismatch");
    const std::size_t k = table.value.dim(1);
    for (std::size_t j = 0; j < indices.size(); ++j) {
        double* dst = table.grad.data() + indices[j] * k;
        const double* src = upstream.data() + j * k;
        for (std::size_t c = 0; c < k; ++c) dst[c] += src[c];
        table.touch(indices[j]);
    }
}

// ---------------------------------------------------------------------------
// Interactions

Tensor bilinear_interaction(const Tensor& E, const Tensor& W) {
    check_dims(E.rank() == 2 && W.rank() == 3, "bilinear: E is m x k, W is k x k x l");
    const std::size_t m = E.dim(0), k = E.dim(1), l = W.dim(2);
    check_dims(W.dim(0) == k && W.dim(1) == k, "bilinear: W slices must be k x k");
    check_dims(m >= 2, "bilinear: need at least two fields");

    Tensor out({pair_count(m), l});
    std::size_t p = 0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j, ++p) {
            double* dst = out.data() + p * l;
            for (std::size_t a = 0; a < k; ++a) {
                const double eia = E(i, a);
                if (eia == 0.0) continue;
                for (std::size_t b = 0; b < k; ++b) {
                    const double coef = eia * E(j, b);
                    const double* w = W.data() + (a * k + b) * l;
                    for (std::size_t u = 0; u < l; ++u) dst[u] += coef * w[u];
                }
            }
        }
    }
    return out;
}

void bilinear_backward(const Tensor& E, const Tensor& W, const Tensor& upstream,
                       Tensor& dE, Tensor& dW) {
    const std::size_t m = E.dim(0), k = E.dim(1), l = W.dim(2);
    check_dims(upstream.rank() == 2 && upstream.dim(0) == pair_count(m) &&
                   upstream.dim(1) == l,
               "bilinear_backward: upstream must be P x l");
    check_dims(dE.shape() == E.shape() && dW.shape() == W.shape(),
               "bilinear_backward: gradient shape mismatch");

    std::size_t p = 0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j, ++p) {
            const double* up = upstream.data() + p * l;
            for (std::size_t a = 0; a < k; ++a) {
                const double eia = E(i, a);
                double acc_i = 0.0;
                for (std::size_t b = 0; b < k; ++b) {
                    const double ejb = E(j, b);
                    const double* w = W.data() + (a * k + b) * l;
                    double* dw = dW.data() + (a * k + b) * l;
                    double s = 0.0;
                    for (std::size_t u = 0; u < l; ++u) {
                        s += up[u] * w[u];
                        dw[u] += up[u] * eia * ejb;
                    }
                    acc_i += s * ejb;
                    dE(j, b) += s * eia;
                }
                dE(i, a) += acc_i;
            }
        }
    }
}

Tensor inner_product_interaction(const Tensor& E) {
    check_dims(E.rank() == 2 && E.dim(0) >= 2, "inner_product: E must be m x k, m >= 2");
    const std::size_t m = E.dim(0), k = E.dim(1);
    Tensor out({pair_count(m)});
    std::size_t p = 0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j, ++p) {
            double s = 0.0;
            for (std::size_t c = 0; c < k; ++c) s += E(i, c) * E(j, c);
            out[p] = s;
        }
    return out;
}

void inner_product_backward(const Tensor& E, const Tensor& upstream, Tensor& dE) {
    const std::size_t m = E.dim(0), k = E.dim(1);
    check_dims(upstream.size() == pair_count(m),
               "inner_product_backward: upstream must have one scalar per pair");
    check_dims(dE.shape() == E.shape(), "inner_product_backward: dE shape mismatch");
    std::size_t p = 0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j, ++p)
            for (std::size_t c = 0; c < k; ++c) {
                dE(i, c) += upstream[p] * E(j, c);
                dE(j, c) += upstream[p] * E(i, c);
            }
}

Tensor elementwise_interaction(const Tensor& E) {
    check_dims(E.rank() == 2 && E.dim(0) >= 2, "elementwise: E must be m x k, m >= 2");
    const std::size_t m = E.dim(0), k = E.dim(1);
    Tensor out({pair_count(m), k});
    std::size_t p = 0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j, ++p)
            for (std::size_t c = 0; c < k; ++c) out(p, c) = E(i, c) * E(j, c);
    return out;
}

void elementwise_backward(const Tensor& E, const Tensor& upstream, Tensor& dE) {
    const std::size_t m = E.dim(0), k = E.dim(1);
    check_dims(upstream.rank() == 2 && upstream.dim(0) == pair_count(m) &&
                   upstream.dim(1) == k,
               "elementwise_backward: upstream must be P x k");
    check_dims(dE.shape() == E.shape(), "elementwise_backward: dE shape mismatch");
    std::size_t p = 0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j, ++p)
            for (std::size_t c = 0; c < k; ++c) {
                dE(i, c) += upstream(p, c) * E(j, c);
                dE(j, c) += upstream(p, c) * E(i, c);
            }
}

// ---------------------------------------------------------------------------
// Concatenation

Tensor concat(const std::vector<Tensor>& parts) {
    if (parts.empty()) throw std::invalid_argument("concat: no parts");
    std::size_t total = 0;
    for (const auto& p : parts) total += p.size();
    Tensor out({total});
    std::size_t at = 0;
    for (const auto& p : parts)
        for (std::size_t i = 0; i < p.size(); ++i) out[at++] = p[i];
    return out;
}

std::vector<Tensor> concat_backward(const Tensor& upstream,
                                    const std::vector<std::size_t>& sizes) {
    std::size_t total = 0;
    for (std::size_t s : sizes) total += s;
    check_dims(total == upstream.size(), "concat_backward: size mismatch");
    std::vector<Tensor> parts;
    parts.reserve(sizes.size());
    std::size_t at = 0;
    for (std::size_t s : sizes) {
        Tensor t({s});
        for (std::size_t i = 0; i < s; ++i) t[i] = upstream[at++];
        parts.push_back(std::move(t));
    }
    return parts;
}

// ---------------------------------------------------------------------------
// Dense layer

DenseLayer::DenseLayer(std::string name, std::size_t d_in, std::size_t d_out,
                       Activation act, Rng& rng)
    : W(name + ".W", xavier_init(d_in, d_out, rng)),
      b(name + ".b", Tensor({d_out})),
      activation(act) {}

Tensor DenseLayer::forward(const Tensor& x, DenseCache* cache) const {
    check_dims(x.size() == in_dim(), "dense: input size mismatch");
    const std::size_t d_out = out_dim(), d_in = in_dim();
    Tensor pre({d_out});
    for (std::size_t o = 0; o < d_out; ++o) {
        const double* w = W.value.data() + o * d_in;
        double s = b.value[o];
        for (std::size_t i = 0; i < d_in; ++i) s += w[i] * x[i];
        pre[o] = s;
    }
    Tensor out({d_out});
    for (std::size_t o = 0; o < d_out; ++o)
        out[o] = activation_apply(activation, pre[o]);
    if (cache) {
        cache->input = x;
        cache->pre = pre;
        cache->output = out;
    }
    return out;
}

Tensor DenseLayer::backward(const DenseCache& cache, const Tensor& upstream) {
    const std::size_t d_out = out_dim(), d_in = in_dim();
    check_dims(upstream.size() == d_out, "dense backward: upstream size mismatch");
    Tensor dx({d_in});
    for (std::size_t o = 0; o < d_out; ++o) {
        const double dz =
            upstream[o] *
            activation_derivative(activation, cache.pre[o], cache.output[o]);
        if (dz == 0.0) continue;
        double* dw = W.grad.data() + o * d_in;
        const double* w = W.value.data() + o * d_in;
        for (std::size_t i = 0; i < d_in; ++i) {
            dw[i] += dz * cache.input[i];
            dx[i] += dz * w[i];
        }
        b.grad[o] += dz;
    }
    return dx;
}

// ---------------------------------------------------------------------------
// Dropout

Tensor dropout_forward(const Tensor& x, double keep_p, LayerMode mode, Rng& rng,
                       Tensor& mask_out) {
    if (!(keep_p > 0.0 && keep_p <= 1.0))
        throw std::invalid_argument("dropout: keep probability must be in (0,1]");
    mask_out = Tensor(x.shape(), 1.0);
    if (mode == LayerMode::eval || keep_p == 1.0) return x;
    Tensor out(x.shape());
    const double scale = 1.0 / keep_p;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mask_out[i] = rng.bernoulli(keep_p) ? scale : 0.0;
        out[i] = x[i] * mask_out[i];
    }
    return out;
}

Tensor dropout_backward(const Tensor& upstream, const Tensor& mask) {
    check_dims(upstream.shape() == mask.shape(), "dropout backward: shape mismatch");
    Tensor dx(upstream.shape());
    for (std::size_t i = 0; i < dx.size(); ++i) dx[i] = upstream[i] * mask[i];
    return dx;
}

// ---------------------------------------------------------------------------
// Batch normalization

BatchNormLayer::BatchNormLayer(std::string name, std::size_t dim)
    : gamma(name + ".gamma", Tensor({dim}, 1.0)),
      beta(name + ".beta", Tensor({dim})),
      running_mean({dim}, 0.0),
      running_var({dim}, 1.0) {}

Tensor BatchNormLayer::forward_train(const Tensor& batch, BatchNormCache* cache) {
    check_dims(batch.rank() == 2 && batch.dim(1) == dim(),
               "batchnorm: batch must be B x D");
    const std::size_t B = batch.dim(0), D = dim();
    if (B < 2)
        throw std::invalid_argument(
            "batchnorm: train-mode batch must hold at least 2 samples");

    Tensor mean({D}), inv_std({D});
    for (std::size_t d = 0; d < D; ++d) {
        double s = 0.0;
        for (std::size_t r = 0; r < B; ++r) s += batch(r, d);
        mean[d] = s / static_cast<double>(B);
    }
    for (std::size_t d = 0; d < D; ++d) {
        // Biased variance, both for normalization and the running estimate.
        double s = 0.0;
        for (std::size_t r = 0; r < B; ++r) {
            const double c = batch(r, d) - mean[d];
            s += c * c;
        }
        const double var = s / static_cast<double>(B);
        inv_std[d] = 1.0 / std::sqrt(var + epsilon);
        running_mean[d] = momentum * running_mean[d] + (1.0 - momentum) * mean[d];
        running_var[d] = momentum * running_var[d] + (1.0 - momentum) * var;
    }

    Tensor x_hat({B, D}), out({B, D});
    for (std::size_t r = 0; r < B; ++r)
        for (std::size_t d = 0; d < D; ++d) {
            x_hat(r, d) = (batch(r, d) - mean[d]) * inv_std[d];
            out(r, d) = gamma.value[d] * x_hat(r, d) + beta.value[d];
        }
    if (cache) {
        cache->input = batch;
        cache->x_hat = x_hat;
        cache->mean = mean;
        cache->inv_std = inv_std;
    }
    return out;
}

Tensor BatchNormLayer::backward_train(const BatchNormCache& cache,
                                      const Tensor& upstream) {
    const std::size_t B = cache.input.dim(0), D = dim();
    check_dims(upstream.shape() == cache.input.shape(),
               "batchnorm backward: upstream shape mismatch");
    Tensor dx({B, D});
    for (std::size_t d = 0; d < D; ++d) {
        double sum_dxhat = 0.0, sum_dxhat_xhat = 0.0, sum_up = 0.0;
        for (std::size_t r = 0; r < B; ++r) {
            const double dxhat = upstream(r, d) * gamma.value[d];
            sum_dxhat += dxhat;
            sum_dxhat_xhat += dxhat * cache.x_hat(r, d);
            sum_up += upstream(r, d);
            gamma.grad[d] += upstream(r, d) * cache.x_hat(r, d);
        }
        beta.grad[d] += sum_up;
        const double inv_b = 1.0 / static_cast<double>(B);
        for (std::size_t r = 0; r < B; ++r) {
            const double dxhat = upstream(r, d) * gamma.value[d];
            dx(r, d) = cache.inv_std[d] *
                       (dxhat - sum_dxhat * inv_b -
                        cache.x_hat(r, d) * sum_dxhat_xhat * inv_b);
        }
    }
    return dx;
}

Tensor BatchNormLayer::forward_eval(const Tensor& x) const {
    const std::size_t D = dim();
    check_dims((x.rank() == 1 && x.size() == D) ||
                   (x.rank() == 2 && x.dim(1) == D),
               "batchnorm eval: input width mismatch");
    Tensor out(x.shape());
    const std::size_t rows = x.rank() == 2 ? x.dim(0) : 1;
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t d = 0; d < D; ++d) {
            const double inv = 1.0 / std::sqrt(running_var[d] + epsilon);
            out[r * D + d] =
                gamma.value[d] * (x[r * D + d] - running_mean[d]) * inv +
                beta.value[d];
        }
    return out;
}

Tensor BatchNormLayer::backward_eval(const Tensor& x, const Tensor& upstream) {
    check_dims(upstream.shape() == x.shape(),
               "batchnorm eval backward: shape mismatch");
    const std::size_t D = dim();
    const std::size_t rows = x.rank() == 2 ? x.dim(0) : 1;
    Tensor dx(x.shape());
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t d = 0; d < D; ++d) {
            const double inv = 1.0 / std::sqrt(running_var[d] + epsilon);
            const double x_hat = (x[r * D + d] - running_mean[d]) * inv;
            gamma.grad[d] += upstream[r * D + d] * x_hat;
            beta.grad[d] += upstream[r * D + d];
            dx[r * D + d] = upstream[r * D + d] * gamma.value[d] * inv;
        }
    return dx;
}

}  // namespace finn
