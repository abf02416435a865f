#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "skylink/numeric.hpp"
#include "skylink/postprocess.hpp"

using namespace skylink;

namespace {

Bits flip_fraction(const Bits& in, double p, Rng& rng) {
    Bits out = in;
    for (auto& b : out) b ^= static_cast<std::uint8_t>(rng.bernoulli(p));
    return out;
}

Bits flip_exact(const Bits& in, std::size_t count, Rng& rng) {
    std::vector<std::size_t> idx(in.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::shuffle(idx.begin(), idx.end(), rng.engine());
    Bits out = in;
    for (std::size_t i = 0; i < count; ++i) out[idx[i]] ^= 1u;
    return out;
}

// Direct m x (n - m) Toeplitz product with the same seed expansion.
Bits naive_toeplitz(const Bits& x, std::size_t m, std::uint64_t seed) {
    const std::size_t n = x.size();
    const std::size_t l = n - m;
    Bits out(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(m));
    if (l == 0 || m == 0) return out;
    const std::size_t seed_bits = m + l - 1;
    Rng rng(seed);
    std::vector<std::uint64_t> words((seed_bits + 63) / 64);
    for (auto& w : words) w = rng();
    auto s = [&](std::size_t d) { return static_cast<std::uint8_t>((words[d / 64] >> (d % 64)) & 1u); };
    for (std::size_t i = 0; i < m; ++i) {
        std::uint8_t acc = 0;
        for (std::size_t j = 0; j < l; ++j) acc ^= s(i + l - 1 - j) & x[m + j];
        out[i] ^= acc;
    }
    return out;
}

double monobit_p(const Bits& b) {
    double s = 0.0;
    for (auto v : b) s += v ? 1.0 : -1.0;
    return std::erfc(std::abs(s) / std::sqrt(2.0 * b.size()));
}

// Overlapping 2-bit serial statistic (NIST del-psi^2_2), chi-square with 2 dof.
double serial_p(const Bits& b) {
    const std::size_t n = b.size();
    double c1[2] = {0, 0};
    double c2[4] = {0, 0, 0, 0};
    for (std::size_t i = 0; i < n; ++i) {
        c1[b[i]] += 1;
        c2[b[i] * 2 + b[(i + 1) % n]] += 1;
    }
    double psi2 = 0.0;
    double psi1 = 0.0;
    for (double c : c2) psi2 += c * c;
    for (double c : c1) psi1 += c * c;
    psi2 = psi2 * 4.0 / n - n;
    psi1 = psi1 * 2.0 / n - n;
    const double del = psi2 - psi1;
    return std::exp(-del / 2.0); // survival of chi-square with 2 dof
}

} // namespace

TEST(Cascade, IdenticalInputsLeakNothing) {
    Rng rng(1);
    const auto a = random_bits(5000, rng);
    const auto r = error_correction(a, a);
    EXPECT_EQ(r.leaked_bits, 0u);
    EXPECT_EQ(r.corrected, a);
    EXPECT_EQ(r.verification_bits, 128u);
}

TEST(Cascade, OnePercentWithinLeakageBound) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        const std::size_t n = 10000;
        const auto a = random_bits(n, rng);
        const auto b = flip_exact(a, n / 100, rng);
        const auto r = error_correction(a, b, CascadeOptions{0.01, 4, seed});
        EXPECT_EQ(r.corrected, a);
        EXPECT_EQ(r.corrections, hamming_distance(a, b));
        EXPECT_LE(static_cast<double>(r.leaked_bits), 1.3 * n * binary_entropy(0.01)) << seed;
    }
}

TEST(Cascade, ThirtyPercentFails) {
    Rng rng(3);
    const auto a = random_bits(10000, rng);
    const auto b = flip_fraction(a, 0.30, rng);
    try {
        error_correction(a, b, CascadeOptions{0.01});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::reconciliation_failure);
    }
    EXPECT_THROW(error_correction(a, b, CascadeOptions{0.30}), Error);
}

TEST(Cascade, ExtraPassWhenResidualErrorsRemain) {
    // Seed where four passes leave an undetected error pair.
    const std::uint64_t seed = 674;
    Rng rng(seed);
    const auto a = random_bits(4000, rng);
    const auto b = flip_fraction(a, 0.011, rng);
    EXPECT_THROW(error_correction(a, b, CascadeOptions{0.011, 4, derive_seed(seed, 1), 0}), Error);
    const auto r = error_correction(a, b, CascadeOptions{0.011, 4, derive_seed(seed, 1)});
    EXPECT_EQ(r.corrected, a);
    EXPECT_EQ(r.passes_run, 5);
    EXPECT_EQ(r.verification_bits, 256u);
}

TEST(Cascade, LengthMismatch) {
    EXPECT_THROW(error_correction(Bits(10), Bits(11)), Error);
}

TEST(Cascade, HashSeparatesSingleBitChanges) {
    Rng rng(4);
    auto a = random_bits(777, rng);
    const auto h = verification_hash(a, 9);
    for (std::size_t i = 0; i < a.size(); i += 37) {
        a[i] ^= 1u;
        EXPECT_FALSE(verification_hash(a, 9) == h);
        a[i] ^= 1u;
    }
    EXPECT_TRUE(verification_hash(a, 9) == h);
}

TEST(PrivacyAmplification, IdentityAtFullLength) {
    Rng rng(5);
    const auto a = random_bits(1000, rng);
    EXPECT_EQ(privacy_amplification(a, a.size(), 17), a);
    EXPECT_TRUE(privacy_amplification(a, 0, 17).empty());
    EXPECT_THROW(privacy_amplification(a, 1001, 17), Error);
}

TEST(PrivacyAmplification, MatchesDirectProduct) {
    Rng rng(6);
    for (std::size_t n : {1u, 2u, 63u, 64u, 65u, 130u, 500u, 1027u}) {
        const auto x = random_bits(n, rng);
        for (std::size_t m : {std::size_t{1}, n / 3, n / 2, n - 1}) {
            if (m == 0 || m > n) continue;
            EXPECT_EQ(privacy_amplification(x, m, 1234 + n), naive_toeplitz(x, m, 1234 + n)) << n << " " << m;
        }
    }
}

TEST(PrivacyAmplification, DeterministicPerSeed) {
    Rng rng(7);
    const auto x = random_bits(4000, rng);
    EXPECT_EQ(privacy_amplification(x, 1500, 1), privacy_amplification(x, 1500, 1));
    EXPECT_NE(privacy_amplification(x, 1500, 1), privacy_amplification(x, 1500, 2));
}

TEST(PrivacyAmplification, MillionBitsPassRandomnessChecks) {
    // Biased input (30% ones): compression must whiten it.
    Rng rng(8);
    Bits x(1'000'000);
    for (auto& b : x) b = rng.bernoulli(0.3);
    const auto y = privacy_amplification(x, 180'000, 99);
    ASSERT_EQ(y.size(), 180'000u);
    EXPECT_GT(monobit_p(y), 0.01);
    EXPECT_GT(serial_p(y), 0.01);
    EXPECT_LT(monobit_p(x), 0.01);
}

TEST(Distill, HonestRunsAgree) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rng rng(seed);
        const auto a = random_bits(4000, rng);
        const auto b = flip_fraction(a, 0.015, rng);
        const auto k = distill_key(a, b, 2000, 0.015, seed);
        ASSERT_EQ(k.alice, k.bob) << seed;
        EXPECT_EQ(k.alice.size(), 2000u);
    }
}
