#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace traitnet::rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// SplitMix64 output function (Stafford mix13). Full avalanche on 64 bits.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Counter-based generator: state walks a Weyl sequence, outputs are mix64 of
// the counter. Same (seed, call index) always yields the same value, which is
// what makes replicate streams reproducible regardless of thread scheduling.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += kGolden;
        return mix64(state_);
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Unbiased integer in [0, bound) by rejection.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t threshold = -bound % bound;
        for (;;) {
            const std::uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    bool bernoulli(double p) { return uniform01() < p; }

    // Standard normal via Acklam's inverse-CDF approximation (|error| < 1.2e-9).
    // One uniform per deviate keeps streams consumption-deterministic.
    double normal() { return inverse_normal_cdf(uniform01()); }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    // Inversion by sequential search; fine for the small means used here.
    int poisson(double mean) {
        double p = std::exp(-mean);
        double cdf = p;
        const double u = uniform01();
        int k = 0;
        while (u > cdf && k < 1000) {
            ++k;
            p *= mean / k;
            cdf += p;
        }
        return k;
    }

    static double inverse_normal_cdf(double p);

private:
    std::uint64_t state_;
};

// Stream for replicate `stream` of a computation seeded with `seed`. Streams
// with distinct indices are statistically independent; the derivation is part
// of the reproducibility contract (see README).
inline SplitMix64 replicate_stream(std::uint64_t seed, std::uint64_t stream) {
    return SplitMix64(mix64(seed ^ mix64((stream + 1) * kGolden)));
}

// Fisher-Yates.
template <typename T>
void shuffle(std::vector<T>& values, SplitMix64& gen) {
    for (std::size_t i = values.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(gen.below(i));
        std::swap(values[i - 1], values[j]);
    }
}

inline double SplitMix64::inverse_normal_cdf(double p) {
    // Coefficients from Acklam (2003).
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    if (p <= 0.0) return -1e308;
    if (p >= 1.0) return 1e308;

    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
               (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

}  // namespace traitnet::rng
