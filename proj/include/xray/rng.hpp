#pragma once

#include <cmath>
#include <cstdint>

namespace xray {

// Counter-based deterministic generator. Output k of stream (seed, stream) is
// a pure function of (seed, stream, k), so identical seeds reproduce identical
// draws on every platform. std::random distributions are implementation
// defined and would break byte-level reproducibility, hence the hand-rolled
// samplers below.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : base_(mix(seed ^ (0x9e3779b97f4a7c15ull * (stream + 1)))) {}

    std::uint64_t next_u64() {
        return mix(base_ + 0x9e3779b97f4a7c15ull * ++counter_);
    }

    // Uniform in [0, 1), 53-bit mantissa.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n), n >= 1. Multiply-shift map; the bias of
    // ~n/2^64 is irrelevant at the scales used here.
    std::uint64_t next_below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    // Box-Muller; the sine half of the pair is discarded to keep the
    // draw count per call fixed.
    double gaussian(double mean, double sigma) {
        const double u1 = 1.0 - next_double();  // (0, 1]
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + sigma * r * std::cos(6.283185307179586476925286766559 * u2);
    }

    // Knuth's product method; fine for the lambdas used here (<= ~30).
    int poisson(double lambda) {
        const double limit = std::exp(-lambda);
        int k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= next_double();
        } while (p > limit);
        return k - 1;
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ull;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t base_;
    std::uint64_t counter_ = 0;
};

}  // namespace xray
