#pragma once

// Bit strings stored one bit per byte, with byte packing and hashing.

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "rng.hpp"

namespace skylink {

using Bits = std::vector<std::uint8_t>;

inline Bits random_bits(std::size_t n, Rng& rng) {
    Bits out(n);
    std::uint64_t word = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i % 64 == 0) word = rng();
        out[i] = static_cast<std::uint8_t>((word >> (i % 64)) & 1u);
    }
    return out;
}

/// MSB-first packing; a trailing partial byte is zero-padded.
inline std::vector<std::uint8_t> pack_bits(const Bits& bits) {
    std::vector<std::uint8_t> out((bits.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i]) out[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
    }
    return out;
}

inline Bits unpack_bits(const std::vector<std::uint8_t>& bytes, std::size_t n_bits) {
    require(n_bits <= bytes.size() * 8, ErrorKind::length_mismatch, "not enough bytes to unpack");
    Bits out(n_bits);
    for (std::size_t i = 0; i < n_bits; ++i) out[i] = (bytes[i / 8] >> (7 - i % 8)) & 1u;
    return out;
}

inline std::size_t hamming_distance(const Bits& a, const Bits& b) {
    require(a.size() == b.size(), ErrorKind::length_mismatch, "bit strings differ in length");
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] != b[i]);
    return d;
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(const std::uint8_t* data, std::size_t n) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= data[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t fnv1a(const std::vector<std::uint8_t>& data) { return fnv1a(data.data(), data.size()); }

inline std::uint64_t fnv1a(std::string_view s) {
    return fnv1a(reinterpret_cast<const std::uint8_t*>(s.data()), s.size());
}

} // namespace skylink
