#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "traitnet/rng.hpp"

using namespace traitnet;

TEST_CASE("replicate streams are reproducible and distinct") {
    auto a1 = rng::replicate_stream(42, 0);
    auto a2 = rng::replicate_stream(42, 0);
    auto b = rng::replicate_stream(42, 1);
    std::vector<std::uint64_t> seq1, seq2, seq3;
    for (int i = 0; i < 16; ++i) {
        seq1.push_back(a1.next());
        seq2.push_back(a2.next());
        seq3.push_back(b.next());
    }
    CHECK(seq1 == seq2);
    CHECK(seq1 != seq3);
}

TEST_CASE("uniform01 stays in [0,1) and below() respects its bound") {
    auto gen = rng::replicate_stream(7, 3);
    for (int i = 0; i < 2000; ++i) {
        const double u = gen.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        CHECK(gen.below(17) < 17);
    }
}

TEST_CASE("shuffle produces a permutation") {
    auto gen = rng::replicate_stream(11, 0);
    std::vector<int> values(40);
    std::iota(values.begin(), values.end(), 0);
    auto shuffled = values;
    rng::shuffle(shuffled, gen);
    auto sorted = shuffled;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == values);
}

TEST_CASE("normal and poisson moments") {
    auto gen = rng::replicate_stream(123, 0);
    double sum = 0.0, ss = 0.0;
    const int n = 50000;
    for (int i = 0; i < n; ++i) {
        const double z = gen.normal();
        sum += z;
        ss += z * z;
    }
    const double mean = sum / n;
    const double var = ss / n - mean * mean;
    CHECK(std::abs(mean) < 0.02);
    CHECK(var == doctest::Approx(1.0).epsilon(0.03));

    double pois_sum = 0.0;
    for (int i = 0; i < n; ++i) pois_sum += gen.poisson(4.3);
    CHECK(pois_sum / n == doctest::Approx(4.3).epsilon(0.02));
}

TEST_CASE("inverse normal cdf inverts the tail function") {
    for (double p : {0.001, 0.01, 0.2, 0.5, 0.8, 0.99, 0.999}) {
        const double z = rng::SplitMix64::inverse_normal_cdf(p);
        const double back = 0.5 * std::erfc(-z / std::sqrt(2.0));
        CHECK(back == doctest::Approx(p).epsilon(1e-6));
    }
}
