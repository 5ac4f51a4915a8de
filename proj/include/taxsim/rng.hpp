#pragma once

#include <cstdint>

namespace taxsim {

// SplitMix64, used for seeding and stream derivation.
struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
};

inline std::uint64_t splitmix_hash(std::uint64_t x) {
    SplitMix64 sm(x);
    return sm.next();
}

/**
 * Deterministic random stream keyed by (seed, stream_id).
 *
 * xoshiro256** core seeded through SplitMix64. The same (seed, stream_id)
 * pair yields the same draw sequence on every platform and regardless of
 * how many other streams exist, so replicas and grid points can each own
 * a private stream and runs stay reproducible under any scheduling.
 */
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id)
        : seed_(seed), stream_id_(stream_id) {
        SplitMix64 sm(splitmix_hash(seed) ^
                      splitmix_hash(stream_id ^ 0xA3C59AC2ED9B8B6FULL));
        for (auto& word : state_) {
            word = sm.next();
        }
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) {
            state_[0] = 0x9E3779B97F4A7C15ULL;
        }
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5ULL, 7) * 9ULL;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform double in [0,1) with 53-bit resolution.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * (1.0 / 9007199254740992.0);
    }

    double uniform(double lo, double hi) { return lo + uniform01() * (hi - lo); }

    bool bernoulli(double p) { return uniform01() < p; }

    // Unbiased integer in [0, bound). bound must be nonzero.
    std::uint64_t uniform_below(std::uint64_t bound) {
        const std::uint64_t threshold = (0ULL - bound) % bound;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x < threshold);
        return x % bound;
    }

    std::size_t uniform_index(std::size_t n) {
        return static_cast<std::size_t>(uniform_below(static_cast<std::uint64_t>(n)));
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t state_[4];
};

}  // namespace taxsim
