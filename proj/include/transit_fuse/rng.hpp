#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "transit_fuse/error.hpp"

namespace tfuse {

// splitmix64 finalizer.
inline uint64_t mix64(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Derives an independent child seed for stream `stream` of a parent seed.
// Parallel workers seeded this way produce the same values as a serial run.
inline uint64_t derive_seed(uint64_t seed, uint64_t stream) {
    return mix64(seed + 0x9e3779b97f4a7c15ULL * (stream + 1));
}

// Deterministic splitmix64 generator. Sampling helpers are hand-rolled
// instead of std::*_distribution so that streams are identical across
// standard library implementations.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_);
    }

    // Uniform in [0, 1), 53 random bits.
    double real01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * real01(); }

    bool bernoulli(double p) { return real01() < p; }

    // Unbiased integer in [0, n).
    uint64_t below(uint64_t n) {
        if (n == 0) throw InvariantError("Rng::below(0)");
        uint64_t const threshold = (0 - n) % n;
        for (;;) {
            uint64_t const r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    // Standard normal via Box-Muller.
    double normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        double u1 = 0.0;
        do {
            u1 = real01();
        } while (u1 <= 0.0);
        double const u2 = real01();
        double const r = std::sqrt(-2.0 * std::log(u1));
        constexpr double kTwoPi = 6.283185307179586476925287;
        cached_ = r * std::sin(kTwoPi * u2);
        has_cached_ = true;
        return r * std::cos(kTwoPi * u2);
    }

    double lognormal(double sigma) { return std::exp(sigma * normal()); }

    // Index drawn proportionally to non-negative weights.
    size_t categorical(std::span<const double> weights) {
        double total = 0.0;
        for (double w : weights) {
            if (w < 0.0) throw InputError("categorical: negative weight");
            total += w;
        }
        if (total <= 0.0) throw InputError("categorical: zero total weight");
        double const u = real01() * total;
        double acc = 0.0;
        for (size_t i = 0; i < weights.size(); ++i) {
            acc += weights[i];
            if (u < acc) return i;
        }
        return weights.size() - 1;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

private:
    uint64_t state_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace tfuse
