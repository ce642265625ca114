#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace dietsynth {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t fnv1a64(std::string_view bytes) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Stable per-subject seed: subjects can be generated independently and in
/// any order without sharing generator state.
inline uint64_t subject_seed(uint64_t master_seed, std::string_view subject_id) {
    return splitmix64(master_seed ^ fnv1a64(subject_id));
}

/// Deterministic random source. All draws go through the mt19937_64 bit
/// stream (standardised output), never through std::uniform_int_distribution,
/// whose mapping is implementation-defined. Same seed, same platform-
/// independent sequence.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    uint64_t next_u64() { return gen_(); }

    /// Uniform integer in [lo, hi], inclusive. Lemire multiply-shift
    /// reduction; bias is < 2^-32 for the ranges used here.
    int uniform_int(int lo, int hi) {
        const uint64_t span = static_cast<uint64_t>(hi) - static_cast<uint64_t>(lo) + 1;
        const auto wide = static_cast<unsigned __int128>(next_u64()) * span;
        return lo + static_cast<int>(wide >> 64);
    }

    /// Uniform index in [0, n).
    size_t index(size_t n) {
        const auto wide = static_cast<unsigned __int128>(next_u64()) * n;
        return static_cast<size_t>(wide >> 64);
    }

    template <typename T>
    const T& pick(const std::vector<T>& v) {
        return v[index(v.size())];
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        if (v.size() < 2) return;
        for (size_t i = v.size() - 1; i > 0; --i) {
            std::swap(v[i], v[index(i + 1)]);
        }
    }

private:
    std::mt19937_64 gen_;
};

} // namespace dietsynth
