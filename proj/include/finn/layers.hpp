#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "finn/tensor.hpp"

namespace finn {

/// A trainable tensor with its gradient accumulator. Row-sparse parameters
/// (embedding table, linear weights) additionally track which rows the
/// current batch touched so gradient clearing and optimizer updates can skip
/// the untouched ones.
struct Param {
    std::string name;
    Tensor value;
    Tensor grad;
    bool row_sparse = false;
    std::vector<std::size_t> touched;

    Param() = default;
    Param(std::string name_, Tensor value_, bool row_sparse_ = false)
        : name(std::move(name_)),
          value(std::move(value_)),
          grad(value.shape()),
          row_sparse(row_sparse_) {}

    std::size_t rows() const { return value.dim(0); }
    std::size_t row_width() const { return value.size() / value.dim(0); }
    void touch(std::size_t row) { touched.push_back(row); }

    /// Zero the accumulated gradient (touched rows only when row-sparse) and
    /// forget the touch list.
    void zero_grad();
};

enum class Activation { identity, relu, sigmoid, tanh };

Activation parse_activation(const std::string& name);
const char* activation_name(Activation a);

/// Number of unordered field pairs, and the position of pair (i, j), i < j,
/// in lexicographic enumeration (0,1), (0,2), ..., (1,2), ...
inline std::size_t pair_count(std::size_t m) { return m * (m - 1) / 2; }

// ---------------------------------------------------------------------------
// Embedding lookup

/// Gather rows table[indices[j]] into an m x k matrix.
Tensor embed_lookup(const std::vector<std::uint32_t>& indices,
                    const Tensor& table);

/// Scatter the upstream m x k gradient back onto the looked-up rows of the
/// table gradient; rows not referenced by `indices` are left untouched.
void embed_lookup_backward(const std::vector<std::uint32_t>& indices,
                           const Tensor& upstream, Param& table);

// ---------------------------------------------------------------------------
// Interaction operators over the m x k field-embedding matrix E

/// p[pair(i,j)][u] = v_i^T W_u v_j with W stored as k x k x l (W(a,b,u)).
/// Output is pair_count(m) x l, pairs in lexicographic order.
Tensor bilinear_interaction(const Tensor& E, const Tensor& W);

/// Accumulate dE (m x k) and dW (k x k x l) from the upstream P x l gradient.
void bilinear_backward(const Tensor& E, const Tensor& W, const Tensor& upstream,
                       Tensor& dE, Tensor& dW);

/// Pair scalars v_i . v_j, lexicographic order; output length pair_count(m).
Tensor inner_product_interaction(const Tensor& E);
void inner_product_backward(const Tensor& E, const Tensor& upstream, Tensor& dE);

/// Pair vectors v_i (*) v_j (componentwise), output pair_count(m) x k.
Tensor elementwise_interaction(const Tensor& E);
void elementwise_backward(const Tensor& E, const Tensor& upstream, Tensor& dE);

// ---------------------------------------------------------------------------
// Concatenation

Tensor concat(const std::vector<Tensor>& parts);
/// Slice the upstream gradient of the concatenation back into per-part
/// gradients with the given sizes.
std::vector<Tensor> concat_backward(const Tensor& upstream,
                                    const std::vector<std::size_t>& sizes);

// ---------------------------------------------------------------------------
// Dense (fully connected) layer

struct DenseCache {
    Tensor input;   // x
    Tensor pre;     // z = W x + b
    Tensor output;  // y = act(z)
};

struct DenseLayer {
    Param W;  // D_out x D_in
    Param b;  // D_out
    Activation activation = Activation::identity;

    DenseLayer() = default;
    DenseLayer(std::string name, std::size_t d_in, std::size_t d_out,
               Activation act, Rng& rng);

    std::size_t in_dim() const { return W.value.dim(1); }
    std::size_t out_dim() const { return W.value.dim(0); }

    Tensor forward(const Tensor& x, DenseCache* cache) const;
    /// Accumulates into W.grad / b.grad and returns dL/dx.
    Tensor backward(const DenseCache& cache, const Tensor& upstream);
};

// ---------------------------------------------------------------------------
// Dropout

enum class LayerMode { train, eval };

/// Inverted dropout: in train mode each component survives with probability
/// keep_p and is scaled by 1/keep_p; mask_out receives the per-component
/// multiplier so the backward pass can reuse it. Eval mode is the identity
/// (mask of ones).
Tensor dropout_forward(const Tensor& x, double keep_p, LayerMode mode, Rng& rng,
                       Tensor& mask_out);
Tensor dropout_backward(const Tensor& upstream, const Tensor& mask);

// ---------------------------------------------------------------------------
// Batch normalization

struct BatchNormCache {
    Tensor input;     // B x D
    Tensor x_hat;     // normalized input
    Tensor mean;      // batch mean per dimension
    Tensor inv_std;   // 1/sqrt(var + eps) per dimension
};

struct BatchNormLayer {
    Param gamma;  // scale, init 1
    Param beta;   // shift, init 0
    Tensor running_mean;
    Tensor running_var;
    double momentum = 0.9;   // weight of the old running value
    double epsilon = 1e-5;

    BatchNormLayer() = default;
    BatchNormLayer(std::string name, std::size_t dim);

    std::size_t dim() const { return gamma.value.dim(0); }

    /// Train mode: normalize by batch statistics (biased variance) and fold
    /// the batch into the running estimates. Batch size must be >= 2.
    Tensor forward_train(const Tensor& batch, BatchNormCache* cache);
    /// Exact gradient through the batch coupling; accumulates gamma/beta
    /// grads and returns dL/dinput (B x D).
    Tensor backward_train(const BatchNormCache& cache, const Tensor& upstream);

    /// Eval mode: affine transform by the frozen running statistics. Works on
    /// a single vector (D) or a batch (B x D).
    Tensor forward_eval(const Tensor& x) const;
    Tensor backward_eval(const Tensor& x, const Tensor& upstream);
};

}  // namespace finn
