#pragma once

// Toeplitz-hash privacy amplification.

#include <bit>
#include <cstdint>
#include <vector>

#include "bits.hpp"
#include "error.hpp"
#include "rng.hpp"

namespace skylink {

/// Compresses n bits to m = `target_length` bits with the modified Toeplitz
/// family y = x[0, m) xor T x[m, n), T an m x (n - m) Toeplitz matrix
/// expanded from `seed`. For m = n the map is the identity.
inline Bits privacy_amplification(const Bits& bits, std::size_t target_length, std::uint64_t seed) {
    const std::size_t n = bits.size();
    require(target_length <= n, ErrorKind::length_mismatch, "target length exceeds the input length");
    const std::size_t m = target_length;
    const std::size_t l = n - m;
    Bits out(bits.begin(), bits.begin() + static_cast<std::ptrdiff_t>(m));
    if (l == 0 || m == 0) return out;

    const std::size_t words = (l + 63) / 64;
    std::vector<std::uint64_t> tail(words, 0);
    for (std::size_t j = 0; j < l; ++j) tail[j / 64] |= std::uint64_t{bits[m + j]} << (j % 64);

    // Diagonal d = i - j + (l - 1) takes value s[d], d in [0, m + l - 1).
    // Row i over j reads s[i + l - 1 - j]; with r the reversal of s
    // (r[t] = s[m + l - 2 - t]) that is r[m - 1 - i + j], a contiguous window.
    const std::size_t seed_bits = m + l - 1;
    std::vector<std::uint64_t> r_words((seed_bits + 63) / 64 + 1, 0);
    {
        Rng rng(seed);
        std::vector<std::uint64_t> s((seed_bits + 63) / 64);
        for (auto& w : s) w = rng();
        for (std::size_t t = 0; t < seed_bits; ++t) {
            const std::size_t src = seed_bits - 1 - t;
            if ((s[src / 64] >> (src % 64)) & 1u) r_words[t / 64] |= std::uint64_t{1} << (t % 64);
        }
    }
    // shifted[k][w] holds bits [64 w + k, 64 w + k + 64) of r.
    std::vector<std::vector<std::uint64_t>> shifted(64, std::vector<std::uint64_t>(r_words.size(), 0));
    for (std::size_t k = 0; k < 64; ++k) {
        for (std::size_t w = 0; w < r_words.size(); ++w) {
            std::uint64_t v = r_words[w] >> k;
            if (k != 0 && w + 1 < r_words.size()) v |= r_words[w + 1] << (64 - k);
            shifted[k][w] = v;
        }
    }
    const std::uint64_t last_mask = (l % 64 == 0) ? ~std::uint64_t{0} : ((std::uint64_t{1} << (l % 64)) - 1);

    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t start = m - 1 - i;
        const auto& row = shifted[start % 64];
        const std::size_t base = start / 64;
        std::uint64_t acc = 0;
        for (std::size_t w = 0; w + 1 < words; ++w) acc ^= row[base + w] & tail[w];
        acc ^= row[base + words - 1] & tail[words - 1] & last_mask;
        out[i] ^= static_cast<std::uint8_t>(std::popcount(acc) & 1);
    }
    return out;
}

} // namespace skylink
