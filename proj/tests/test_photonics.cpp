#include <gtest/gtest.h>

#include <cmath>

#include "skylink/numeric.hpp"
#include "skylink/photonics.hpp"

using namespace skylink;

TEST(PhotonNumber, PoissonValues) {
    EXPECT_DOUBLE_EQ(poisson_photon_stats(0.0).p0(), 1.0);
    EXPECT_DOUBLE_EQ(poisson_photon_stats(0.0).p(0), 1.0);
    EXPECT_NEAR(poisson_photon_stats(0.1).p_multi(), 0.00467884016, 1e-11);
    EXPECT_NEAR(poisson_photon_stats(0.12).p1(), 0.10643045241, 1e-11);
    EXPECT_THROW(poisson_photon_stats(-0.1), Error);
}

TEST(PhotonNumber, NormalizedUpToTwenty) {
    for (double mu = 0.0; mu <= 2.0; mu += 0.05) {
        const auto s = poisson_photon_stats(mu);
        double sum = 0.0;
        for (unsigned n = 0; n <= 20; ++n) sum += s.p(n);
        EXPECT_NEAR(sum, 1.0, 1e-12) << mu;
        EXPECT_NEAR(s.p(1), s.p1(), 1e-15);
    }
}

TEST(Sync, WindowEfficiency) {
    EXPECT_NEAR(window_efficiency(SyncModel{}), 0.94129006, 1e-8);
    EXPECT_DOUBLE_EQ(window_efficiency(SyncModel{1e8, 0.0, 1e-9}), 1.0);
    EXPECT_NEAR(window_efficiency(SyncModel{1e8, 1e-9, 2e-9}), 0.68268949, 1e-8);
    double prev = 0.0;
    for (double w = 0.5e-9; w < 5e-9; w += 0.5e-9) {
        const double e = window_efficiency(SyncModel{1e8, 529e-12, w});
        EXPECT_GT(e, prev);
        EXPECT_LE(e, 1.0);
        prev = e;
    }
    prev = 1.0;
    for (double j = 300e-12; j < 2e-9; j += 100e-12) {
        const double e = window_efficiency(SyncModel{1e8, j, 2e-9});
        EXPECT_LT(e, prev);
        prev = e;
    }
    EXPECT_THROW(window_efficiency(SyncModel{1e8, 1e-9, 0.0}), Error);
}

TEST(Detector, RadiationDrift) {
    DetectorModel det;
    det.dark_rate_cps = 100.0;
    EXPECT_DOUBLE_EQ(dark_rate_after(det, 30.0, false), 6670.0);
    EXPECT_LE(dark_rate_after(det, 30.0, true), 130.0);
    EXPECT_DOUBLE_EQ(dark_rate_after(det, 0.0, false), 100.0);
    EXPECT_DOUBLE_EQ(dark_rate_after(det, 0.0, true), 100.0);
    EXPECT_THROW(dark_rate_after(det, -1.0, true), Error);
}

TEST(Detector, DeadTime) {
    EXPECT_DOUBLE_EQ(apply_dead_time(0.0, 50e-9), 0.0);
    EXPECT_NEAR(apply_dead_time(1e6, 50e-9), 1e6 / 1.05, 1e-6);
    EXPECT_LT(apply_dead_time(1e9, 50e-9), 1.0 / 50e-9);
}

namespace {
DetectorModel ideal_detector() { return DetectorModel{1.0, 0.0}; }
} // namespace

TEST(Coincidence, TwoLinkProductFormula) {
    const SpdcSource src;
    const double eta = std::sqrt(from_db(-64.0));
    auto r = coincidence_rates(src, eta, eta, ideal_detector(), ideal_detector(), SyncModel{}, 0.0, 0.0);
    EXPECT_NEAR(r.coincidences, 2.2109325, 1e-6);
    const double e82 = std::sqrt(from_db(-82.0));
    r = coincidence_rates(src, e82, e82, ideal_detector(), ideal_detector(), SyncModel{}, 0.0, 0.0);
    EXPECT_NEAR(r.coincidences, 0.0350409, 1e-6);
}

TEST(Coincidence, ZeroPairRate) {
    const SpdcSource src{0.0};
    const auto r = coincidence_rates(src, 0.1, 0.1, DetectorModel{}, DetectorModel{}, SyncModel{}, 500, 500);
    EXPECT_EQ(r.singles_a, 0.0);
    EXPECT_EQ(r.singles_b, 0.0);
    EXPECT_EQ(r.coincidences, 0.0);
    EXPECT_EQ(r.accidentals, 0.0);
}

TEST(Coincidence, ScalingLaws) {
    const DetectorModel det;
    const SyncModel sync;
    const auto base = coincidence_rates(SpdcSource{1e6}, 1e-3, 2e-3, det, det, sync, 300, 300);
    const auto doubled = coincidence_rates(SpdcSource{2e6}, 1e-3, 2e-3, det, det, sync, 300, 300);
    EXPECT_NEAR(doubled.coincidences, 2.0 * base.coincidences, 1e-12);
    const auto halved = coincidence_rates(SpdcSource{1e6}, 0.5e-3, 2e-3, det, det, sync, 300, 300);
    EXPECT_NEAR(halved.coincidences, 0.5 * base.coincidences, 1e-12);
    EXPECT_NEAR(base.snr, base.coincidences / base.accidentals, 1e-15);
    EXPECT_NEAR(base.accidentals, base.singles_a * base.singles_b * sync.window_s, 1e-15);
}

TEST(Coincidence, BackgroundCalibration) {
    const SpdcSource src;
    const double eta = std::sqrt(from_db(-75.0));
    const DetectorModel det{1.0, 0.0};
    const double bg = background_for_snr(src, eta, eta, det, det, SyncModel{}, 8.0);
    EXPECT_NEAR(bg, 2264.3, 1.0);
    const auto r = coincidence_rates(src, eta, eta, det, det, SyncModel{}, bg, bg);
    EXPECT_NEAR(r.snr, 8.0, 1e-9);
    // An impossible target (cleaner than the signal alone allows) yields zero background.
    EXPECT_DOUBLE_EQ(background_for_snr(src, 0.5, 0.5, det, det, SyncModel{}, 1e12), 0.0);
}

TEST(Coincidence, MonteCarloMatchesAnalytic) {
    const DetectorModel det{0.8, 0.0};
    const SyncModel sync;
    const double eta_a = 0.5;
    const double eta_b = 0.4;
    Rng rng(2024);
    const std::uint64_t n = 100000;
    const auto s = sample_pairs(n, eta_a, eta_b, det, det, sync, rng);
    const double p = eta_a * eta_b * det.efficiency * det.efficiency * window_efficiency(sync);
    const double expected = p * n;
    EXPECT_NEAR(static_cast<double>(s.coincidences), expected, 3.0 * std::sqrt(expected));
    const double ea = eta_a * det.efficiency * n;
    EXPECT_NEAR(static_cast<double>(s.clicks_a), ea, 3.0 * std::sqrt(ea));
}

TEST(Wcp, Validation) {
    WcpSource src;
    EXPECT_NO_THROW(src.validate());
    EXPECT_NEAR(src.mean_photon_number(), 0.425, 1e-15);
    src.intensities = {0.1, 0.8, 0.0};
    EXPECT_THROW(src.validate(), Error);
    src = WcpSource{};
    src.probabilities = {0.5, 0.5, 0.5};
    EXPECT_THROW(src.validate(), Error);
}
