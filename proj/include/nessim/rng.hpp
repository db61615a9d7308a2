// Deterministic random streams: xoshiro256** seeded through splitmix64.
//
// Stream splitting protocol: stream k of a run with root seed R is seeded by
// iterating splitmix64 from state R + k * 0x9E3779B97F4A7C15 (golden-ratio
// increment), which yields the four xoshiro state words. Distinct k give
// statistically independent streams; the same (R, k) always reproduces the
// same sequence.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>

namespace nessim {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class RandomStream {
public:
    using result_type = std::uint64_t;

    explicit RandomStream(std::uint64_t seed = 0x853C49E6748FEA9BULL) {
        std::uint64_t sm = seed;
        for (auto& word : s_) word = splitmix64(sm);
        has_spare_ = false;
        spare_ = 0.0;
    }

    // Stream k derived from a single root seed (see protocol above).
    static RandomStream child(std::uint64_t root, std::uint64_t stream_id) {
        return RandomStream(root + stream_id * 0x9E3779B97F4A7C15ULL);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // UniformRandomBitGenerator interface (usable with <random> distributions).
    std::uint64_t operator()() { return next_u64(); }
    static constexpr std::uint64_t min() { return 0; }
    static constexpr std::uint64_t max() { return std::numeric_limits<std::uint64_t>::max(); }

    // Uniform on [0,1) with 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0,1]; safe as a log argument.
    double uniform_pos() { return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; }

    double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

    std::pair<double, double> normal_pair() {
        const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
        const double theta = 2.0 * M_PI * uniform();
        return {r * std::cos(theta), r * std::sin(theta)};
    }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        auto [z0, z1] = normal_pair();
        spare_ = z1;
        has_spare_ = true;
        return z0;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t s_[4];
    bool has_spare_;
    double spare_;
};

}  // namespace nessim
