#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace fakenews {

/// Deterministic RNG with hand-rolled distributions so that splits, fold
/// plans and parameter initializations are reproducible byte-for-byte across
/// platforms and standard libraries. Core generator is splitmix64.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t next_below(std::uint64_t bound) {
        // Rejection sampling on the top bits; bias-free.
        const std::uint64_t limit = bound * (UINT64_MAX / bound);
        std::uint64_t x = next_u64();
        while (x >= limit) {
            x = next_u64();
        }
        return x % bound;
    }

    /// Uniform double in [0, 1) with 53 bits of precision.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double next_double(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    /// Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(values[i - 1], values[j]);
        }
    }

private:
    std::uint64_t state_;
};

/// Derives an independent stream seed from (seed, index), e.g. one per fold.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    SeededRng rng(seed ^ (0x517cc1b727220a95ULL * (index + 1)));
    return rng.next_u64();
}

} // namespace fakenews
