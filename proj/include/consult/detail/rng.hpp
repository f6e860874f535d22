#pragma once

// Seeded RNG wrapper with self-owned bounded-draw / shuffle / unit-interval
// helpers. std::uniform_int_distribution is implementation-defined, so the
// standard distributions cannot back any output that must be reproducible
// byte-for-byte; everything here is pinned down by the mt19937_64 stream.

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "consult/detail/sha256.hpp"

namespace consult::detail {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    /// Uniform draw in [0, n) by rejection, bias-free.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) return 0;
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t v;
        do {
            v = eng_();
        } while (v >= limit);
        return v % n;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            using std::swap;
            swap(items[i - 1], items[j]);
        }
    }

    /// Sample k distinct indices from [0, n) without replacement.
    std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k) {
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        // partial Fisher-Yates: the first k slots end up as the sample
        for (std::size_t i = 0; i < k && i < n; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(below(n - i));
            std::swap(idx[i], idx[j]);
        }
        idx.resize(std::min(k, n));
        return idx;
    }

private:
    std::mt19937_64 eng_;
};

/// Stage seeds are derived by hashing the global seed with a stage label so
/// each pipeline stage is independently reproducible.
inline std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view label) {
    Sha256 h;
    unsigned char seed_be[8];
    for (int i = 0; i < 8; ++i) seed_be[i] = static_cast<unsigned char>(global_seed >> (56 - 8 * i));
    h.update(seed_be, 8);
    h.update(label);
    const auto d = h.finish();
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | d[static_cast<std::size_t>(i)];
    return v;
}

}  // namespace consult::detail
