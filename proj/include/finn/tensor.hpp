#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace finn {

/// Dense row-major tensor of doubles. Shape is fixed at construction;
/// product(shape) == element count always holds.
class Tensor {
public:
    Tensor() = default;

    explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0);

    static Tensor from_data(std::vector<std::size_t> shape, std::vector<double> data);

    const std::vector<std::size_t>& shape() const noexcept { return shape_; }
    std::size_t rank() const noexcept { return shape_.size(); }
    std::size_t dim(std::size_t i) const { return shape_.at(i); }
    std::size_t size() const noexcept { return data_.size(); }

    double* data() noexcept { return data_.data(); }
    const double* data() const noexcept { return data_.data(); }

    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    // rank-2 access
    double& operator()(std::size_t i, std::size_t j) { return data_[i * shape_[1] + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * shape_[1] + j]; }

    // rank-3 access
    double& operator()(std::size_t i, std::size_t j, std::size_t u) {
        return data_[(i * shape_[1] + j) * shape_[2] + u];
    }
    double operator()(std::size_t i, std::size_t j, std::size_t u) const {
        return data_[(i * shape_[1] + j) * shape_[2] + u];
    }

    /// Row view of a rank-2 tensor.
    std::span<double> row(std::size_t r) {
        return {data_.data() + r * shape_[1], shape_[1]};
    }
    std::span<const double> row(std::size_t r) const {
        return {data_.data() + r * shape_[1], shape_[1]};
    }

    void fill(double v);
    bool all_finite() const;

    bool operator==(const Tensor& other) const = default;

private:
    std::vector<std::size_t> shape_;
    std::vector<double> data_;
};

/// Deterministic pseudo-random source. The same seed always yields the same
/// draw sequence, bit for bit; uniform doubles are derived from the raw
/// 64-bit stream rather than std::uniform_real_distribution so the mapping
/// is pinned across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform double in [low, high).
    double uniform(double low, double high) {
        double v = low + (high - low) * next_double();
        if (v >= high) v = std::nextafter(high, low);
        return v;
    }

    /// Uniform index in [0, bound); rejection sampling avoids modulo bias.
    std::size_t next_index(std::size_t bound);

    bool bernoulli(double p) { return next_double() < p; }

private:
    std::mt19937_64 engine_;
};

/// Seeded in-place Fisher-Yates shuffle.
template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = rng.next_index(i);
        std::swap(v[i - 1], v[j]);
    }
}

/// Xavier (Glorot) uniform initializer: entries drawn from [-b, b] with
/// b = sqrt(6 / (fan_in + fan_out)). Returns a fan_out x fan_in matrix.
Tensor xavier_init(std::size_t fan_in, std::size_t fan_out, Rng& rng);

/// Entries drawn uniformly from [low, high).
Tensor uniform_init(std::vector<std::size_t> shape, double low, double high, Rng& rng);

/// Numerically stable logistic function; never overflows for finite input.
inline double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    double e = std::exp(x);
    return e / (1.0 + e);
}

inline double relu(double x) { return x > 0.0 ? x : 0.0; }

}  // namespace finn
