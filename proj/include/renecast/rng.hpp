#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace renecast {

/// splitmix64 (Vigna 2015, https://prng.di.unimi.it). 64 bits of state,
/// bit-exact on every platform, which is what makes every seeded path in the
/// pipeline reproducible across languages and compilers.
class DeterministicRng {
public:
    explicit DeterministicRng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1): the top 53 bits of the next output.
    double next_f64() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    std::uint64_t operator()() { return next_u64(); }

private:
    std::uint64_t state_;
};

/// FNV-1a, 64-bit. Used to derive independent per-series simulation seeds
/// (seed XOR fnv1a64(country/source)), so results do not depend on the order
/// in which series are fitted.
inline std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

/// Fisher-Yates shuffle of 0..n-1. Swap partner j = next_u64() mod (i + 1),
/// i descending from n-1 to 1.
inline std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    DeterministicRng rng(seed);
    for (std::size_t i = n; i-- > 1;) {
        std::size_t j = static_cast<std::size_t>(rng.next_u64() % (i + 1));
        std::swap(idx[i], idx[j]);
    }
    return idx;
}

}  // namespace renecast
