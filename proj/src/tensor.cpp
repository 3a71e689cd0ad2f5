#include "finn/tensor.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace finn {

namespace {

std::size_t checked_element_count(const std::vector<std::size_t>& shape) {
    std::size_t count = 1;
    for (std::size_t extent : shape) {
        if (extent == 0) {
            throw std::invalid_argument("Tensor: zero extent in shape");
        }
        count *= extent;
    }
    return count;
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape, double fill)
    : shape_(std::move(shape)), data_(checked_element_count(shape_), fill) {}

Tensor Tensor::from_data(std::vector<std::size_t> shape, std::vector<double> data) {
    if (checked_element_count(shape) != data.size()) {
        throw std::invalid_argument("Tensor: shape does not match data length");
    }
    Tensor t;
    t.shape_ = std::move(shape);
    t.data_ = std::move(data);
    return t;
}

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool Tensor::all_finite() const {
    return std::all_of(data_.begin(), data_.end(),
                       [](double v) { return std::isfinite(v); });
}

std::size_t Rng::next_index(std::size_t bound) {
    if (bound == 0) {
        throw std::invalid_argument("Rng::next_index: zero bound");
    }
    const std::uint64_t b = bound;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % b;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return static_cast<std::size_t>(x % b);
}

Tensor xavier_init(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
    if (fan_in == 0 || fan_out == 0) {
        throw std::invalid_argument("xavier_init: fan_in and fan_out must be positive");
    }
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    Tensor t({fan_out, fan_in});
    for (std::size_t i = 0; i < t.size(); ++i) {
        t[i] = rng.uniform(-bound, bound);
    }
    return t;
}

Tensor uniform_init(std::vector<std::size_t> shape, double low, double high, Rng& rng) {
    if (!(low < high)) {
        throw std::invalid_argument("uniform_init: low must be < high");
    }
    Tensor t(std::move(shape));
    for (std::size_t i = 0; i < t.size(); ++i) {
        t[i] = rng.uniform(low, high);
    }
    return t;
}

}  // namespace finn
