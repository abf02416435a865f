#pragma once

// Sifted key -> final key: reconciliation followed by privacy amplification.

#include <algorithm>
#include <cstdint>

#include "bits.hpp"
#include "privacy_amplification.hpp"
#include "reconciliation.hpp"

namespace skylink {

struct DistilledKey {
    Bits alice;
    Bits bob;
    std::size_t leaked_bits = 0;
    std::size_t corrections = 0;
};

/// Reconciles and compresses to at most `target_length` bits, never more than
/// what is left after subtracting disclosed parities and the hash tag.
/// Reconciliation failure propagates; no key is produced in that case.
inline DistilledKey distill_key(const Bits& alice, const Bits& bob, std::size_t target_length, double expected_qber,
                                std::uint64_t seed) {
    const auto rec = error_correction(alice, bob, CascadeOptions{expected_qber, 4, derive_seed(seed, 1)});
    const std::size_t disclosed = rec.leaked_bits + rec.verification_bits;
    const std::size_t budget = alice.size() > disclosed ? alice.size() - disclosed : 0;
    const std::size_t m = std::min(target_length, budget);
    const std::uint64_t pa_seed = derive_seed(seed, 2);
    DistilledKey out;
    out.alice = privacy_amplification(alice, m, pa_seed);
    out.bob = privacy_amplification(rec.corrected, m, pa_seed);
    out.leaked_bits = rec.leaked_bits;
    out.corrections = rec.corrections;
    return out;
}

} // namespace skylink
