#pragma once

// Deterministic random number generation. All randomness in the library flows
// through RandomStream so that results are bit-reproducible for a given seed,
// independent of platform or standard-library version (std::normal_distribution
// is implementation-defined, so we roll our own Box-Muller on top of
// xoshiro256++).

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace surge {

/// SplitMix64 step; also used as the mixing function for seed derivation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Stable seed derivation: hashes the master seed together with a list of
/// context words (component tag, batch size, cell indices, ...). Used to give
/// every grid cell / oracle its own independent, order-free stream.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> words) {
    std::uint64_t h = master ^ 0x6a09e667f3bcc908ULL;
    for (std::uint64_t w : words) {
        h ^= splitmix64(w);
        h = splitmix64(h);
    }
    return h;
}

/// Hash a string tag into a context word (FNV-1a).
inline std::uint64_t tag_word(const char* tag) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char* p = tag; *p; ++p) {
        h ^= static_cast<std::uint64_t>(*p);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// xoshiro256++ engine (Blackman & Vigna), seeded via SplitMix64.
class Xoshiro256pp {
  public:
    explicit Xoshiro256pp(std::uint64_t seed = 1) {
        for (auto& w : s_) w = splitmix64(seed);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::array<std::uint64_t, 4> s_{};
};

/// Deterministic stream of uniforms and normals.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed = 1) : eng_(seed) {}

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(eng_.next() >> 11) * 0x1.0p-53; }

    /// Uniform in (0, 1]; safe as a log() argument.
    double uniform_pos() { return static_cast<double>((eng_.next() >> 11) + 1) * 0x1.0p-53; }

    /// Uniform integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n) { return eng_.next() % n; }

    /// Standard normal via Box-Muller (pairs cached).
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        const double u1 = uniform_pos();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

    void fill_normal(std::span<double> out) {
        for (double& x : out) x = normal();
    }

    std::vector<double> normal_vector(std::size_t n) {
        std::vector<double> v(n);
        fill_normal(v);
        return v;
    }

  private:
    Xoshiro256pp eng_;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

}  // namespace surge
