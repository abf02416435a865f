#pragma once

// Cascade error correction with a final universal-hash verification.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <numeric>
#include <vector>

#include "bits.hpp"
#include "error.hpp"
#include "rng.hpp"

namespace skylink {

struct CascadeOptions {
    double expected_qber = 0.01;
    int passes = 4;
    std::uint64_t seed = 0x5eed;
    int extra_passes = 6; // run while the verification hash still differs
};

struct ReconcileResult {
    Bits corrected;
    std::size_t leaked_bits = 0;        // parities disclosed
    std::size_t verification_bits = 128; // hash tag disclosed
    std::size_t corrections = 0;
    int passes_run = 0;
};

/// Two independent polynomial hashes modulo 2^61 - 1 of the packed bits.
struct VerificationHash {
    std::uint64_t h1 = 0;
    std::uint64_t h2 = 0;
    bool operator==(const VerificationHash&) const = default;
};

namespace detail {

constexpr std::uint64_t mersenne61 = (1ULL << 61) - 1;

inline std::uint64_t mulmod61(std::uint64_t a, std::uint64_t b) {
    const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    std::uint64_t r = static_cast<std::uint64_t>(p & mersenne61) + static_cast<std::uint64_t>(p >> 61);
    if (r >= mersenne61) r -= mersenne61;
    return r;
}

inline std::uint64_t poly_hash(const std::vector<std::uint8_t>& bytes, std::uint64_t n_bits, std::uint64_t x) {
    std::uint64_t h = n_bits % mersenne61;
    for (std::uint8_t b : bytes) {
        h = mulmod61(h, x) + b + 1;
        if (h >= mersenne61) h -= mersenne61;
    }
    return h;
}

} // namespace detail

inline VerificationHash verification_hash(const Bits& bits, std::uint64_t seed) {
    const auto bytes = pack_bits(bits);
    const std::uint64_t x1 = 2 + splitmix64(seed) % (detail::mersenne61 - 3);
    const std::uint64_t x2 = 2 + splitmix64(seed ^ 0xA5A5A5A5A5A5A5A5ULL) % (detail::mersenne61 - 3);
    return {detail::poly_hash(bytes, bits.size(), x1), detail::poly_hash(bytes, bits.size(), x2)};
}

/// Corrects `bob` towards `alice`. Alice's side is consulted only through
/// parity queries, each counted in leaked_bits.
inline ReconcileResult error_correction(const Bits& alice, const Bits& bob, const CascadeOptions& options = {}) {
    require(alice.size() == bob.size(), ErrorKind::length_mismatch, "reconciliation inputs differ in length");
    require(options.passes >= 1, ErrorKind::domain, "cascade needs at least one pass");
    const std::size_t n = alice.size();
    ReconcileResult out;
    out.corrected = bob;
    const std::uint64_t hash_seed = derive_seed(options.seed, 0xC0FFEE);
    if (verification_hash(alice, hash_seed) == verification_hash(bob, hash_seed)) return out;

    const double q = std::clamp(options.expected_qber, 1e-3, 0.5);
    const std::size_t k1 = std::max<std::size_t>(2, static_cast<std::size_t>(0.73 / q));
    std::size_t k = k1;

    std::vector<std::vector<std::size_t>> order;    // order[p][j] = position
    std::vector<std::vector<std::size_t>> where;    // where[p][i] = j
    std::vector<std::size_t> block_size;
    std::vector<std::vector<std::uint8_t>> parity_a; // revealed block parities
    Bits& b = out.corrected;

    auto parity_range = [&](const Bits& v, std::size_t p, std::size_t lo, std::size_t hi) {
        std::uint8_t s = 0;
        for (std::size_t j = lo; j < hi; ++j) s ^= v[order[p][j]];
        return s;
    };

    // Binary search for one error inside [lo, hi) of pass p; returns the position.
    auto locate = [&](std::size_t p, std::size_t lo, std::size_t hi) {
        while (hi - lo > 1) {
            const std::size_t mid = lo + (hi - lo) / 2;
            ++out.leaked_bits;
            if (parity_range(alice, p, lo, mid) != parity_range(b, p, lo, mid)) hi = mid; else lo = mid;
        }
        return order[p][lo];
    };

    const int max_passes = options.passes + std::max(0, options.extra_passes);
    for (int p = 0; p < max_passes; ++p) {
        std::vector<std::size_t> ord(n);
        std::iota(ord.begin(), ord.end(), std::size_t{0});
        if (p > 0) {
            Rng rng(derive_seed(options.seed, static_cast<std::uint64_t>(p)));
            std::shuffle(ord.begin(), ord.end(), rng.engine());
        }
        std::vector<std::size_t> inv(n);
        for (std::size_t j = 0; j < n; ++j) inv[ord[j]] = j;
        order.push_back(std::move(ord));
        where.push_back(std::move(inv));
        block_size.push_back(std::min(k, n));
        const std::size_t bs = block_size.back();
        const std::size_t blocks = (n + bs - 1) / bs;
        parity_a.emplace_back(blocks);
        for (std::size_t blk = 0; blk < blocks; ++blk) {
            parity_a.back()[blk] = parity_range(alice, static_cast<std::size_t>(p), blk * bs, std::min(n, (blk + 1) * bs));
        }
        out.leaked_bits += blocks;

        std::deque<std::pair<std::size_t, std::size_t>> work; // (pass, block)
        for (std::size_t blk = 0; blk < blocks; ++blk) work.emplace_back(static_cast<std::size_t>(p), blk);

        while (!work.empty()) {
            const auto [pp, blk] = work.front();
            work.pop_front();
            const std::size_t s = block_size[pp];
            const std::size_t lo = blk * s;
            const std::size_t hi = std::min(n, lo + s);
            if (parity_range(b, pp, lo, hi) == parity_a[pp][blk]) continue;
            const std::size_t pos = locate(pp, lo, hi);
            b[pos] ^= 1u;
            ++out.corrections;
            for (std::size_t other = 0; other < order.size(); ++other) {
                if (other == pp) continue;
                work.emplace_back(other, where[other][pos] / block_size[other]);
            }
        }
        out.passes_run = p + 1;
        // Extra passes go back to small blocks so leftover error pairs split up.
        k = out.passes_run < options.passes ? k * 2 : k1;
        if (out.passes_run >= options.passes) {
            if (verification_hash(alice, hash_seed) == verification_hash(b, hash_seed)) break;
            // Each further comparison discloses another tag.
            if (out.passes_run < max_passes) out.verification_bits += 128;
        }
    }

    if (!(verification_hash(alice, hash_seed) == verification_hash(b, hash_seed))) {
        throw Error(ErrorKind::reconciliation_failure, "verification hash mismatch after " +
                                                           std::to_string(out.passes_run) + " cascade passes");
    }
    if (out.leaked_bits >= n) {
        throw Error(ErrorKind::reconciliation_failure, "parity leakage exhausted the key");
    }
    return out;
}

} // namespace skylink
