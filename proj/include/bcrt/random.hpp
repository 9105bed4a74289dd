#pragma once

#include <cstdint>
#include <cmath>
#include <random>

namespace bcrt {

/// SplitMix64 finalizer; used to turn (seed, counter) pairs into well-mixed
/// engine seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of the stream owned by one replica. Distinct (seed, replica, salt)
/// triples give distinct engine states; nothing depends on the order in which
/// replicas are evaluated.
constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t replica,
                                    std::uint64_t salt = 0) noexcept {
    return splitmix64(splitmix64(seed ^ splitmix64(salt)) + replica);
}

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed, std::uint64_t replica, std::uint64_t salt = 0) {
    return Engine{stream_seed(seed, replica, salt)};
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Engine& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, bound).
inline std::uint64_t uniform_index(Engine& rng, std::uint64_t bound) {
    // Reject the short tail so the draw is exactly uniform.
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        const std::uint64_t r = rng();
        if (r >= threshold) return r % bound;
    }
}

/// Standard normal deviate (Marsaglia polar method). Written out rather than
/// using std::normal_distribution so that streams are identical across
/// standard library implementations.
class NormalSource {
public:
    double operator()(Engine& rng) {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01(rng) - 1.0;
            v = 2.0 * uniform01(rng) - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        has_spare_ = true;
        return u * m;
    }

private:
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace bcrt
