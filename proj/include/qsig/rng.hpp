#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

#include "qsig/math.hpp"

namespace qsig {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace detail

/// Deterministic xoshiro256++ stream. Streams are derived from a
/// (seed, path...) key so that parallel workers never share state and the
/// draw sequence is independent of scheduling.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) {
        std::uint64_t t = seed;
        for (auto& w : state_) w = detail::splitmix64(t);
    }

    static RngStream derive(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
        std::uint64_t t = seed;
        std::uint64_t key = detail::splitmix64(t);
        for (std::uint64_t p : path) {
            t = key ^ (p + 0x9e3779b97f4a7c15ULL);
            key = detail::splitmix64(t);
        }
        return RngStream(key);
    }

    std::uint64_t next() {
        auto rotl = [](std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); };
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform draw on (0, 1].
    double uniform() {
        return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; pairs are cached so consecutive calls
    /// consume one uniform pair per two normals.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    bool bernoulli(double p) { return uniform() <= p; }

private:
    std::uint64_t state_[4];
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace qsig
