#pragma once

#include <cmath>
#include <cstdint>

#include "fkpde/errors.hpp"

namespace fkpde {

// Splittable random stream (SplitMix64 core with a per-stream odd increment,
// as in SplittableRandom). Streams are cheap value types: identical
// (seed, index) always reproduces the identical sequence, and distinct
// indices give statistically independent streams, so parallel runs are
// reproducible independent of thread scheduling.
//
// No std::<random> distributions anywhere: their sequences are
// implementation-defined and would break bit-exact seeded reproducibility.
class RngStream {
public:
    RngStream() : RngStream(0, 0) {}

    RngStream(std::uint64_t seed, std::uint64_t stream_index) {
        identity_ = mix(mix(seed ^ 0x9E3779B97F4A7C15ull) + stream_index);
        state_ = mix(identity_);
        gamma_ = mix(identity_ ^ 0x5851F42D4C957F2Dull) | 1ull;
    }

    // Child stream keyed by `index`; depends only on this stream's identity,
    // not on how much of it has been consumed.
    RngStream child(std::uint64_t index) const { return RngStream(identity_, index); }

    std::uint64_t next_u64() {
        state_ += gamma_;
        return mix(state_);
    }

    // Uniform on [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1]; safe as a log() argument.
    double uniform_pos() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

    double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

    // Standard normal via the polar method, second variate cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        for (int it = 0; it < kRejectionCap; ++it) {
            const double u = 2.0 * uniform() - 1.0;
            const double v = 2.0 * uniform() - 1.0;
            const double s = u * u + v * v;
            if (s > 0.0 && s < 1.0) {
                const double m = std::sqrt(-2.0 * std::log(s) / s);
                spare_ = v * m;
                have_spare_ = true;
                return u * m;
            }
        }
        throw internal_error("rng: polar normal rejection cap exceeded");
    }

    bool bernoulli(double p) { return uniform() < p; }

    // Poisson count via exponential spacings; adequate for the small means
    // used by thinning (rate * span rarely above a few tens).
    std::uint64_t poisson(double mean) {
        if (mean <= 0.0) return 0;
        std::uint64_t n = 0;
        double acc = exponential(1.0);
        while (acc <= mean) {
            ++n;
            acc += exponential(1.0);
            if (n > 100'000'000ull) throw internal_error("rng: poisson runaway");
        }
        return n;
    }

private:
    static constexpr int kRejectionCap = 1'000'000;

    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ull;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t identity_ = 0;  // never advanced; keys child derivation
    std::uint64_t state_ = 0;
    std::uint64_t gamma_ = 1;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace fkpde
