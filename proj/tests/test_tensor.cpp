#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "finn/tensor.hpp"

using namespace finn;

namespace {

double mean_of(const Tensor& t) {
    double s = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) s += t[i];
    return s / static_cast<double>(t.size());
}

double variance_of(const Tensor& t) {
    double mu = mean_of(t);
    double s = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) s += (t[i] - mu) * (t[i] - mu);
    return s / static_cast<double>(t.size());
}

}  // namespace

TEST_CASE("tensor stores row-major and validates shape") {
    Tensor t({2, 3});
    CHECK(t.rank() == 2);
    CHECK(t.size() == 6);
    t(1, 2) = 7.0;
    t(0, 1) = -1.5;
    CHECK(t.data()[1 * 3 + 2] == 7.0);
    CHECK(t.data()[0 * 3 + 1] == -1.5);
    CHECK(t.row(1)[2] == 7.0);

    Tensor cube({2, 3, 4});
    cube(1, 2, 3) = 9.0;
    CHECK(cube.data()[(1 * 3 + 2) * 4 + 3] == 9.0);

    CHECK_THROWS_AS(Tensor({2, 0, 3}), std::invalid_argument);
    CHECK_THROWS_AS(Tensor::from_data({2, 2}, {1.0, 2.0, 3.0}),
                    std::invalid_argument);

    Tensor u = Tensor::from_data({2, 2}, {1, 2, 3, 4});
    CHECK(u(1, 0) == 3.0);
    CHECK(u == Tensor::from_data({2, 2}, {1, 2, 3, 4}));

    Tensor filled({3}, 2.5);
    CHECK(filled[0] == 2.5);
    filled.fill(-1.0);
    CHECK(filled[2] == -1.0);

    CHECK(u.all_finite());
    u[0] = std::nan("");
    CHECK_FALSE(u.all_finite());
}

TEST_CASE("rng is seed-deterministic") {
    Rng a(42), b(42), c(43);
    bool all_equal = true, any_diff_seed43 = false;
    for (int i = 0; i < 1000; ++i) {
        double x = a.next_double(), y = b.next_double(), z = c.next_double();
        all_equal = all_equal && (x == y);
        any_diff_seed43 = any_diff_seed43 || (x != z);
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
    }
    CHECK(all_equal);
    CHECK(any_diff_seed43);
}

TEST_CASE("rng uniform stays inside the half-open range") {
    Rng rng(7);
    for (int i = 0; i < 10000; ++i) {
        double v = rng.uniform(-0.5, 0.25);
        CHECK(v >= -0.5);
        CHECK(v < 0.25);
    }
}

TEST_CASE("rng next_index is bounded and covers the range") {
    Rng rng(11);
    std::vector<int> hits(10, 0);
    for (int i = 0; i < 10000; ++i) {
        std::size_t j = rng.next_index(10);
        REQUIRE(j < 10);
        ++hits[j];
    }
    for (int h : hits) CHECK(h > 0);
    CHECK(rng.next_index(1) == 0);
    CHECK_THROWS_AS(rng.next_index(0), std::invalid_argument);
}

TEST_CASE("shuffle permutes deterministically") {
    std::vector<int> v(100);
    std::iota(v.begin(), v.end(), 0);
    std::vector<int> w = v, original = v;

    Rng r1(5), r2(5), r3(6);
    shuffle(v, r1);
    shuffle(w, r2);
    CHECK(v == w);

    std::vector<int> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == original);

    std::vector<int> u = original;
    shuffle(u, r3);
    CHECK(u != v);
}

TEST_CASE("xavier_init obeys its bound and variance") {
    Rng rng(7);
    Tensor single = xavier_init(1, 1, rng);
    CHECK(single.size() == 1);
    CHECK(std::fabs(single[0]) <= std::sqrt(3.0));

    Rng r1(1), r2(1);
    Tensor t = xavier_init(100, 100, r1);
    CHECK(t.shape() == std::vector<std::size_t>{100, 100});
    const double bound = std::sqrt(6.0 / 200.0);
    for (std::size_t i = 0; i < t.size(); ++i)
        REQUIRE(std::fabs(t[i]) <= bound);
    // Uniform on [-b, b] has variance b^2/3 = 2/(fan_in+fan_out) = 0.01.
    double var = variance_of(t);
    CHECK(var > 0.008);
    CHECK(var < 0.012);
    CHECK(t.all_finite());

    CHECK(t == xavier_init(100, 100, r2));
    CHECK_THROWS_AS(xavier_init(0, 5, rng), std::invalid_argument);
    CHECK_THROWS_AS(xavier_init(5, 0, rng), std::invalid_argument);
}

TEST_CASE("uniform_init fills the requested range") {
    Rng rng(3);
    Tensor tiny = uniform_init({2, 2}, 0.0, 1e-9, rng);
    for (std::size_t i = 0; i < tiny.size(); ++i) {
        CHECK(tiny[i] >= 0.0);
        CHECK(tiny[i] < 1e-9);
    }

    Rng r1(3), r2(3);
    Tensor t = uniform_init({1000}, -0.01, 0.01, r1);
    CHECK(std::fabs(mean_of(t)) < 0.002);
    CHECK(t == uniform_init({1000}, -0.01, 0.01, r2));
    CHECK_THROWS_AS(uniform_init({2}, 0.5, 0.5, rng), std::invalid_argument);
    CHECK_THROWS_AS(uniform_init({2}, 1.0, -1.0, rng), std::invalid_argument);
}

TEST_CASE("sigmoid is stable, symmetric and increasing") {
    CHECK(sigmoid(0.0) == 0.5);

    double hi = sigmoid(100.0);
    CHECK(hi <= 1.0);
    // 1 - 1e-30 is not representable in double; >= is the faithful check.
    CHECK(hi >= 1.0 - 1e-30);
    CHECK(std::isfinite(sigmoid(700.0)));
    CHECK(std::isfinite(sigmoid(-700.0)));
    CHECK(sigmoid(-700.0) >= 0.0);

    for (double x : {-30.0, -5.0, -1.0, 0.0, 0.5, 3.0, 20.0})
        CHECK(std::fabs(sigmoid(x) + sigmoid(-x) - 1.0) <= 1e-12);

    double prev = sigmoid(-30.0);
    for (double x = -29.5; x <= 30.0; x += 0.5) {
        double cur = sigmoid(x);
        CHECK(cur > prev);
        prev = cur;
    }
}

TEST_CASE("relu clamps negatives and is idempotent") {
    CHECK(relu(-3.0) == 0.0);
    CHECK(relu(5.0) == 5.0);
    CHECK(relu(0.0) == 0.0);
    for (double x : {-2.0, -1e-9, 0.0, 1e-9, 7.5})
        CHECK(relu(relu(x)) == relu(x));
}
