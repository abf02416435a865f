#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "skylink/report.hpp"
#include "skylink/scenario_io.hpp"

using namespace skylink;

namespace {

double loss_at(const Scenario& s, std::size_t station, double range_km) {
    // Elevation of a satellite at `range_km` from the law of cosines.
    const double re = constants::earth_radius_km;
    const double rs = re + s.orbit.altitude_m / 1e3;
    const double sin_el = (rs * rs - re * re - range_km * range_km) / (2.0 * re * range_km);
    const double elev = std::asin(sin_el) * constants::rad_to_deg;
    return -link_loss(s.link_config(station), range_km, elev).total_db();
}

double expected_sifted_rate(const Scenario& s, double range_km) {
    const double re = constants::earth_radius_km;
    const double rs = re + s.orbit.altitude_m / 1e3;
    const double elev = std::asin((rs * rs - re * re - range_km * range_km) / (2.0 * re * range_km)) * constants::rad_to_deg;
    const auto det = s.detector_model();
    const auto sync = s.sync_model();
    const double eta = link_loss(s.link_config(0), range_km, elev).total() * det.efficiency * window_efficiency(sync);
    const auto st = expected_decoy_stats(s.wcp_source(), eta, detail::noise_probability(det, sync, s.background_cps(0)),
                                         s.protocol.misalignment, s.source.rep_rate_hz);
    return st.sifted();
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream b;
    b << f.rdbuf();
    return b.str();
}

} // namespace

TEST(Verdicts, ThresholdsFlipAtBoundaries) {
    const double eps = 1e-9;
    auto passed = [](const std::vector<Verdict>& v, std::size_t i) { return v.at(i).passed; };
    EXPECT_TRUE(passed(qkd_requirements(40.0, 2000, 0.01), 0));
    EXPECT_FALSE(passed(qkd_requirements(40.0 + eps, 2000, 0.01), 0));
    EXPECT_TRUE(passed(qkd_requirements(30, 1000.0, 0.01), 1));
    EXPECT_FALSE(passed(qkd_requirements(30, 1000.0 - eps, 0.01), 1));
    EXPECT_TRUE(passed(qkd_requirements(30, 2000, 0.035), 2));
    EXPECT_FALSE(passed(qkd_requirements(30, 2000, 0.035 + eps), 2));

    EXPECT_FALSE(passed(entanglement_requirements(80.0 + eps, 2000, 0.9), 0));
    EXPECT_TRUE(passed(entanglement_requirements(80.0, 2000, 0.9), 0));
    EXPECT_FALSE(passed(entanglement_requirements(70, 999, 0.9), 1));
    EXPECT_TRUE(passed(entanglement_requirements(70, 1000, 0.9), 1));
    EXPECT_FALSE(passed(entanglement_requirements(70, 2000, 0.85 - eps), 2));
    EXPECT_TRUE(passed(entanglement_requirements(70, 2000, 0.85), 2));

    EXPECT_FALSE(passed(teleportation_requirements(55.0 + eps, 500, 0.8), 0));
    EXPECT_TRUE(passed(teleportation_requirements(55.0, 500, 0.8), 0));
    EXPECT_FALSE(passed(teleportation_requirements(50, 399, 0.8), 1));
    EXPECT_TRUE(passed(teleportation_requirements(50, 400, 0.8), 1));
    EXPECT_FALSE(passed(teleportation_requirements(50, 500, 0.75 - eps), 2));
    EXPECT_TRUE(passed(teleportation_requirements(50, 500, 0.75), 2));
}

TEST(Presets, DownlinkLossCurve) {
    const auto s = load_preset("micius-qkd-xinglong");
    EXPECT_NEAR(loss_at(s, 0, 530.0), 29.0, 3.0);
    EXPECT_NEAR(loss_at(s, 0, 1600.0), 44.0, 3.0);
}

TEST(Presets, DownlinkSiftedRates) {
    const auto s = load_preset("micius-qkd-xinglong");
    const double r645 = expected_sifted_rate(s, 645.0);
    const double r1200 = expected_sifted_rate(s, 1200.0);
    EXPECT_GT(r645, 12e3 / 2.0);
    EXPECT_LT(r645, 12e3 * 2.0);
    EXPECT_GT(r1200, 1e3 / 2.0);
    EXPECT_LT(r1200, 1e3 * 2.0);

    const auto r = run_scenario(s);
    ASSERT_EQ(r.qkd.size(), 1u);
    EXPECT_LE(r.qkd[0].qber, 0.02);
    EXPECT_TRUE(r.all_passed());
}

TEST(Presets, TwoDownlinkLossBand) {
    const auto r = run_scenario(load_preset("micius-entanglement-dlh-ljg"));
    ASSERT_TRUE(r.entanglement);
    EXPECT_GE(r.entanglement->min_loss_db, 64.0);
    EXPECT_LE(r.entanglement->max_loss_db, 82.0);
    EXPECT_GT(r.entanglement->snr, 5.0);
    EXPECT_GT(r.entanglement->chsh_sampled.S, 2.0);
}

TEST(Presets, UplinkLossAndFidelity) {
    const auto s = load_preset("micius-teleport-ngari");
    EXPECT_NEAR(loss_at(s, 0, 1400.0), 52.0, 4.0);
    const auto r = run_scenario(s);
    ASSERT_TRUE(r.teleport);
    EXPECT_NEAR(r.teleport->min_loss_db, 41.0, 4.0);
    EXPECT_NEAR(r.teleport->max_loss_db, 52.0, 4.0);
    EXPECT_GE(r.teleport->fidelity.mean_fidelity, 0.75);
    EXPECT_LE(r.teleport->fidelity.mean_fidelity, 0.85);
    EXPECT_TRUE(r.plots.count("fidelity.csv"));
    EXPECT_NE(to_csv(r.plots.at("fidelity.csv")).find("classical_limit,0.666666666667"), std::string::npos);
}

TEST(Presets, SmallPayloadAndDaylightRates) {
    const auto tg = run_scenario(load_preset("tiangong2"));
    EXPECT_GT(tg.qkd[0].final_rate_bps, 91.0 / 3.0);
    EXPECT_LT(tg.qkd[0].final_rate_bps, 91.0 * 3.0);

    const auto day = run_scenario(load_preset("daylight-53km"));
    EXPECT_DOUBLE_EQ(day.qkd[0].min_loss_db, 48.0);
    EXPECT_GE(day.qkd[0].final_rate_bps, 20.0);
    EXPECT_LE(day.qkd[0].final_rate_bps, 400.0);
}

TEST(Mission, AggregateIsSumOfPasses) {
    auto s = load_preset("micius-qkd-xinglong");
    s.mission.passes = 3;
    const auto r = run_scenario(s);
    const auto& q = r.qkd.at(0);
    ASSERT_EQ(q.passes.size(), 3u);
    double asym = 0.0, fin = 0.0, sifted = 0.0;
    for (const auto& p : q.passes) {
        asym += p.key.secure_bits_asymptotic;
        fin += p.key.secure_bits_finite;
        sifted += p.stats.sifted();
        EXPECT_TRUE(p.keys_agree);
        EXPECT_LE(static_cast<double>(p.distilled_bits), p.key.secure_bits_finite);
    }
    EXPECT_DOUBLE_EQ(q.secure_bits_asymptotic, asym);
    EXPECT_DOUBLE_EQ(q.secure_bits_finite, fin);
    EXPECT_DOUBLE_EQ(q.sifted_bits, sifted);
    // Different passes draw different counts.
    EXPECT_NE(q.passes[0].stats.sifted(), q.passes[1].stats.sifted());
}

TEST(Mission, DeterministicAcrossWorkers) {
    for (const char* name : {"micius-qkd-xinglong", "micius-entanglement-dlh-ljg", "micius-teleport-ngari"}) {
        auto s = load_preset(name);
        s.mission.workers = 1;
        const auto a = run_scenario(s);
        s.mission.workers = 4;
        const auto b = run_scenario(s);
        EXPECT_EQ(to_csv(a.pass), to_csv(b.pass)) << name;
        EXPECT_EQ(a.summary, b.summary) << name;
        EXPECT_EQ(a.plots, b.plots) << name;
        s.seeds.master += 1;
        const auto c = run_scenario(s);
        EXPECT_NE(a.summary, c.summary) << name;
    }
}

TEST(Relay, PresetExchangesPayloads) {
    const auto r = run_scenario(load_preset("micius-relay-xinglong-graz"));
    ASSERT_TRUE(r.relay);
    EXPECT_EQ(r.relay->shared_bytes, 100000u);
    ASSERT_EQ(r.relay->transfers.size(), 2u);
    EXPECT_EQ(r.relay->transfers[0].bytes, 5340u);
    EXPECT_EQ(r.relay->transfers[1].bytes, 4900u);
    EXPECT_TRUE(r.relay->all_ok());
    EXPECT_EQ(r.relay->remaining_bytes, 100000u - 5340u - 4900u);
    EXPECT_TRUE(r.all_passed());
}

TEST(Relay, TamperAndShortKeys) {
    auto make = [](std::size_t n) {
        KeyStore store;
        Rng rng(9);
        Bytes x(n), g(n);
        for (auto& v : x) v = static_cast<std::uint8_t>(rng() & 0xFF);
        for (auto& v : g) v = static_cast<std::uint8_t>(rng() & 0xFF);
        store.add(KeyMaterial{"MX", x, {"x", "sat"}, {}, false});
        store.add(KeyMaterial{"MG", g, {"g", "sat"}, {}, false});
        return store;
    };
    {
        auto store = make(1000);
        const auto tr = intercontinental_demo(store, "MX", "MG", {100, 200}, 1);
        EXPECT_TRUE(tr.all_ok());
        EXPECT_EQ(tr.remaining_bytes, 700u);
        EXPECT_TRUE(store.get("MX").consumed);
        EXPECT_THROW(store.consume("MX"), Error);
    }
    {
        auto store = make(1000);
        const auto tr = intercontinental_demo(store, "MX", "MG", {100, 200}, 1, true);
        EXPECT_FALSE(tr.transfers[0].ok);
        EXPECT_FALSE(tr.all_ok());
    }
    for (std::size_t n : {std::size_t{0}, std::size_t{50}}) {
        auto store = make(n);
        try {
            intercontinental_demo(store, "MX", "MG", {100}, 1);
            ADD_FAILURE() << n;
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::insufficient_key);
        }
    }
}

TEST(Constellation, ThroughputArithmetic) {
    const auto t = constellation_throughput({3, 900.0}, 100, 50.0, 2e6);
    EXPECT_EQ(t.per_station_bits_per_year, 100e6);
    EXPECT_EQ(t.aggregate_bits_per_year, 10e9);
    EXPECT_THROW(constellation_throughput({0, 900.0}, 100, 50.0, 2e6), Error);
    EXPECT_THROW(constellation_throughput({3, 900.0}, 0, 50.0, 2e6), Error);

    const auto r = run_scenario(load_preset("constellation-3x900"));
    ASSERT_TRUE(r.constellation);
    EXPECT_NEAR(r.constellation->statistics.passes_per_day, 3.7, 1.1);
    EXPECT_NEAR(r.constellation->statistics.mean_duration_s / 60.0, 5.0, 1.5);
    EXPECT_EQ(r.constellation->throughput.aggregate_bits_per_year, 10e9);
}

TEST(Gravity, PresetUsesCalibratedCoherenceTime) {
    const auto r = run_scenario(load_preset("gravity-micius"));
    ASSERT_TRUE(r.gravity);
    EXPECT_NEAR(r.gravity->coherence_time_s / 2.15585063931e-13, 1.0, 1e-8);
    ASSERT_EQ(r.gravity->estimates.size(), 5u);
    for (double d : r.gravity->predicted_D) {
        EXPECT_GT(d, 0.95);
        EXPECT_LT(d, 0.99);
    }
    EXPECT_TRUE(r.all_passed());
}

TEST(Report, BundleLayoutAndDeterminism) {
    const auto base = std::filesystem::temp_directory_path() / "skylink_report_test";
    std::filesystem::remove_all(base);
    const auto s = load_preset("micius-qkd-xinglong");
    const auto b1 = emit_report(run_scenario(s), base / "a");
    const auto b2 = emit_report(run_scenario(s), base / "b");
    ASSERT_EQ(b1.files, b2.files);
    for (const auto& f : b1.files) {
        EXPECT_TRUE(std::filesystem::exists(base / "a" / f)) << f;
        EXPECT_EQ(slurp(base / "a" / f), slurp(base / "b" / f)) << f;
    }
    const std::string summary = slurp(base / "a" / "summary.txt");
    EXPECT_NE(summary.find("PASS total channel loss <= 40 dB"), std::string::npos) << summary;
    EXPECT_NE(summary.find("PASS raw key rate >= 1000 bps"), std::string::npos);
    EXPECT_NE(summary.find("PASS QBER <= 0.035"), std::string::npos);
    EXPECT_TRUE(std::filesystem::exists(base / "a" / "keys" / "keys.csv"));

    // loss_vs_elevation: elevation increasing, range and loss decreasing.
    std::ifstream f(base / "a" / "plots" / "loss_vs_elevation.csv");
    std::string line;
    std::getline(f, line);
    EXPECT_EQ(line, "elevation_deg,range_km,total_db");
    double pe = -1, pr = 1e9, pl = -1e9;
    int rows = 0;
    while (std::getline(f, line)) {
        double e, r, l;
        ASSERT_EQ(std::sscanf(line.c_str(), "%lf,%lf,%lf", &e, &r, &l), 3);
        EXPECT_GT(e, pe);
        EXPECT_LT(r, pr);
        EXPECT_GT(l, pl); // total_db is negative loss
        pe = e, pr = r, pl = l;
        ++rows;
    }
    EXPECT_GT(rows, 70);
    std::filesystem::remove_all(base);
}
