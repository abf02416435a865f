#include <gtest/gtest.h>

#include <cmath>

#include "skylink/qkd.hpp"

using namespace skylink;

namespace {

DetectorModel quiet_detector(double efficiency = 1.0) { return DetectorModel{efficiency, 0.0}; }
SyncModel sharp_sync() { return SyncModel{100e6, 0.0, 2e-9}; }

// Expected counts tuned to 1,671,072 sifted bits at QBER ~1.1%.
DecoyStats xinglong_like_stats(double misalignment = 0.0095, double n_pulses = 27219131539.065018) {
    return expected_decoy_stats(WcpSource{}, 2.88e-4, 4e-7, misalignment, n_pulses);
}

} // namespace

TEST(Encoding, PolarizationBijection) {
    for (Basis basis : {Basis::Z, Basis::X}) {
        for (std::uint8_t bit : {0, 1}) {
            const BasisBit bb{basis, bit};
            EXPECT_EQ(from_polarization(polarization_deg(bb)), bb);
        }
    }
    EXPECT_DOUBLE_EQ(polarization_deg({Basis::Z, 0}), 0.0);
    EXPECT_DOUBLE_EQ(polarization_deg({Basis::Z, 1}), 90.0);
    EXPECT_DOUBLE_EQ(polarization_deg({Basis::X, 0}), -45.0);
    EXPECT_DOUBLE_EQ(polarization_deg({Basis::X, 1}), 45.0);
    EXPECT_THROW(from_polarization(30.0), Error);
}

TEST(Bb84, LosslessBrightPulsesAllDetected) {
    WcpSource src;
    src.intensities = {60.0, 40.0, 0.0};
    src.probabilities = {0.5, 0.5, 0.0};
    Bb84Options opt;
    opt.misalignment = 0.0;
    const auto t = bb84_round(src, LinkBudget{}, quiet_detector(), sharp_sync(), 20000, 7, opt);
    for (const auto& p : t.pulses) EXPECT_TRUE(p.detected);
    const auto s = sift_and_qber(t);
    EXPECT_EQ(s.errors, 0u);
    EXPECT_DOUBLE_EQ(s.qber, 0.0);
    EXPECT_NEAR(static_cast<double>(s.sifted_bits), 10000.0, 4.0 * 70.7);
}

TEST(Bb84, SiftedRatesAtMidAndLongRange) {
    // Link loss excludes the detector; a 0.8-efficiency detector sits behind it.
    const WcpSource src;
    const std::uint64_t n = 10'000'000;
    const auto mid = sift_and_qber(bb84_round(src, LinkBudget::from_total(from_db(-33.0)), quiet_detector(0.8),
                                              SyncModel{}, n, 11));
    const double mid_rate = mid.sifted_bits / (n / src.rep_rate_hz);
    EXPECT_GE(mid_rate, 12000.0 / 2.0);
    EXPECT_LE(mid_rate, 12000.0 * 2.0);
    const auto far = sift_and_qber(bb84_round(src, LinkBudget::from_total(from_db(-40.0)), quiet_detector(0.8),
                                              SyncModel{}, n, 12));
    const double far_rate = far.sifted_bits / (n / src.rep_rate_hz);
    EXPECT_GE(far_rate, 1000.0 / 2.0);
    EXPECT_LE(far_rate, 1000.0 * 2.0);
}

TEST(Bb84, WorkerCountDoesNotChangeTranscript) {
    const WcpSource src;
    Bb84Options one;
    Bb84Options four;
    four.workers = 4;
    const auto link = LinkBudget::from_total(1e-2);
    const auto a = bb84_round(src, link, DetectorModel{}, SyncModel{}, 3'000'000, 99, one);
    const auto b = bb84_round(src, link, DetectorModel{}, SyncModel{}, 3'000'000, 99, four);
    ASSERT_EQ(a.pulses.size(), b.pulses.size());
    for (std::size_t i = 0; i < a.pulses.size(); ++i) {
        ASSERT_EQ(a.pulses[i].detected, b.pulses[i].detected);
        ASSERT_EQ(a.pulses[i].bob_bit, b.pulses[i].bob_bit);
        ASSERT_EQ(a.pulses[i].alice_bit, b.pulses[i].alice_bit);
    }
}

TEST(Bb84, InterceptResendRaisesQberToQuarter) {
    WcpSource src;
    src.intensities = {60.0, 40.0, 0.0};
    src.probabilities = {0.5, 0.5, 0.0};
    Bb84Options opt;
    opt.misalignment = 0.0;
    opt.intercept_fraction = 1.0;
    const auto s = sift_and_qber(bb84_round(src, LinkBudget{}, quiet_detector(), sharp_sync(), 200000, 3, opt));
    EXPECT_NEAR(s.qber, 0.25, 0.01);
}

TEST(Sift, EmptyAndSameBasis) {
    Transcript t;
    EXPECT_THROW(sift_and_qber(t), Error);
    t.pulses.resize(10);
    try {
        sift_and_qber(t);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::empty_sift);
    }
    for (auto& p : t.pulses) p.detected = true;
    const auto s = sift_and_qber(t);
    EXPECT_EQ(s.sifted_bits, 10u);
}

TEST(Sift, EntangledPairsHalveOnRandomBases) {
    const auto pairs = bbm92_round(6208, 0.045, 5);
    const auto s = sift_pairs(pairs);
    EXPECT_NEAR(static_cast<double>(s.sifted_bits), 3104.0, 3.0 * std::sqrt(6208 * 0.25));

    std::vector<PairRecord> fixed(3100);
    for (std::size_t i = 0; i < 140; ++i) fixed[i].bit_b = 1;
    EXPECT_NEAR(sift_pairs(fixed).qber, 0.045, 0.001);
}

TEST(Decoy, BoundsBracketTrueYieldAndAreTight) {
    // Noiseless channel, ideal detector: the single-photon yield is eta.
    const double eta = 0.05;
    Bb84Options opt;
    opt.misalignment = 0.0;
    const auto s = sift_and_qber(bb84_round(WcpSource{}, LinkBudget::from_total(eta), quiet_detector(), sharp_sync(),
                                            10'000'000, 21, opt));
    const auto b = decoy_bounds(s.stats);
    EXPECT_LE(b.y1_lower, eta);
    EXPECT_GT(b.y1_lower, 0.9 * eta);
}

TEST(Decoy, SoundOverSeededRuns) {
    const double eta = 0.05;
    const double e1_true = 0.01;
    int sound = 0;
    const int runs = 200;
    for (int seed = 0; seed < runs; ++seed) {
        Rng rng(static_cast<std::uint64_t>(seed));
        const auto st = sample_decoy_stats(WcpSource{}, eta, 0.0, e1_true, 10'000'000, rng);
        const auto b = decoy_bounds(st, 1e-9);
        sound += (b.y1_lower <= eta && b.e1_upper >= e1_true);
    }
    EXPECT_GE(sound, static_cast<int>(0.99 * runs));
}

TEST(Decoy, Preconditions) {
    DecoyStats vac_only;
    vac_only.counts[2] = {1000.0, 3.0, 1.5, 0.7};
    try {
        decoy_bounds(vac_only);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::domain);
    }
    DecoyStats broken;
    broken.counts[0] = {1000.0, 1.0, 0.5, 0.0};
    broken.counts[1] = {1000.0, 0.0, 0.0, 0.0};
    broken.counts[2] = {1000.0, 50.0, 25.0, 12.0};
    try {
        decoy_bounds(broken);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::inconsistent_statistics);
    }
}

TEST(Decoy, LosslessNoiselessPhaseErrorVanishes) {
    const auto st = expected_decoy_stats(WcpSource{}, 1.0, 0.0, 0.0, 1e6);
    EXPECT_DOUBLE_EQ(decoy_bounds(st).e1_upper, 0.0);
}

TEST(KeyLength, FrozenXinglongLikeValues) {
    const auto st = xinglong_like_stats();
    EXPECT_NEAR(st.sifted(), 1671072.0, 1e-3);
    EXPECT_NEAR(st.qber(), 0.0110979, 1e-6);
    const auto r = secure_key_length(st, 1.16, 1e-9);
    EXPECT_NEAR(r.secure_bits_asymptotic, 453441.0, 1.0);
    EXPECT_NEAR(r.secure_bits_finite, 421895.0, 1.0);
    const double ratio = r.secure_bits_finite / r.sifted_bits;
    EXPECT_GE(ratio, 0.10);
    EXPECT_LE(ratio, 0.30);
    EXPECT_LE(r.secure_bits_finite, r.secure_bits_asymptotic);
    EXPECT_LE(r.secure_bits_asymptotic, r.sifted_bits);
}

TEST(KeyLength, MonotoneInQberAndEpsilon) {
    double prev = 1e18;
    for (double e = 0.0; e <= 0.12; e += 0.005) {
        const auto r = secure_key_length(xinglong_like_stats(e), 1.16, 1e-9);
        EXPECT_LE(r.secure_bits_finite, prev) << e;
        prev = r.secure_bits_finite;
    }
    prev = 1e18;
    for (double eps : {1e-3, 1e-6, 1e-9, 1e-12, 1e-15}) {
        const auto r = secure_key_length(xinglong_like_stats(), 1.16, eps);
        EXPECT_LE(r.secure_bits_finite, prev);
        prev = r.secure_bits_finite;
    }
}

TEST(KeyLength, ZeroAtElevenPercent) {
    for (double e : {0.11, 0.15, 0.25}) {
        const auto st = xinglong_like_stats(e);
        EXPECT_GE(st.qber(), 0.11 - 0.002);
        const auto r = secure_key_length(st);
        EXPECT_EQ(r.secure_bits_asymptotic, 0.0) << e;
        EXPECT_EQ(r.secure_bits_finite, 0.0) << e;
    }
    EXPECT_EQ(bbm92_key_length(1e6, 0.11).secure_bits_asymptotic, 0.0);
}

TEST(KeyLength, EntanglementBasedRates) {
    const auto one = bbm92_key_length(1.0, 0.045, 1.1);
    EXPECT_NEAR(one.secure_bits_asymptotic, 0.4439934, 1e-6);
    const auto block = bbm92_key_length(3100.0, 0.045, 1.1);
    EXPECT_NEAR(block.secure_bits_finite, 479.0, 1.0);
    EXPECT_GT(block.secure_bits_finite, 0.0);
    EXPECT_LT(block.secure_bits_finite / 3100.0, one.secure_bits_asymptotic);
}
