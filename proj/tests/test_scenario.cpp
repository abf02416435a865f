#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "skylink/scenario_io.hpp"

using namespace skylink;

namespace {

const char* minimal_qkd = R"([mission]
kind = downlink-qkd
name = t

[orbit]
altitude = 500 km

[stations]
name = s
latitude = 40 deg
altitude = 0 m
min_elevation = 10 deg

[source]
type = wcp

[detectors]
efficiency = 0.5

[seeds]
master = 3
)";

Error parse_error(const std::string& text) {
    try {
        parse_scenario_text(text, "t.scn");
    } catch (const Error& e) {
        return e;
    }
    ADD_FAILURE() << "no error";
    return Error(ErrorKind::validation, "");
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
    const auto at = s.find(from);
    EXPECT_NE(at, std::string::npos) << from;
    return s.replace(at, from.size(), to);
}

} // namespace

TEST(ScenarioFile, PresetsShipAndLoad) {
    const auto names = list_presets();
    for (const char* want : {"micius-qkd-xinglong", "micius-entanglement-dlh-ljg", "micius-teleport-ngari", "tiangong2",
                             "daylight-53km", "micius-relay-xinglong-graz"}) {
        EXPECT_NE(std::find(names.begin(), names.end(), want), names.end()) << want;
    }
    for (const auto& n : names) EXPECT_NO_THROW(load_preset(n)) << n;
}

TEST(ScenarioFile, EmitParseIsFixedPoint) {
    for (const auto& n : list_presets()) {
        const Scenario a = load_preset(n);
        const std::string text = emit_scenario(a);
        const Scenario b = parse_scenario_text(text, n);
        EXPECT_EQ(a, b) << n;
        EXPECT_EQ(emit_scenario(b), text) << n;
    }
}

TEST(ScenarioFile, UnitsConvertToSi) {
    const auto s = parse_scenario_text(minimal_qkd);
    EXPECT_DOUBLE_EQ(s.orbit.altitude_m, 500e3);
    const auto t = parse_scenario_text(replace(minimal_qkd, "altitude = 500 km", "altitude = 500000 m"));
    EXPECT_EQ(s, t);
    const auto u = parse_scenario_text(replace(minimal_qkd, "[detectors]\n", "[detectors]\nwindow = 2500 ps\n"));
    EXPECT_DOUBLE_EQ(u.detectors.window_s, 2.5e-9);
}

TEST(ScenarioFile, MissingUnitNamesTheKey) {
    const auto e = parse_error(replace(minimal_qkd, "altitude = 500 km", "altitude = 500"));
    EXPECT_EQ(e.kind(), ErrorKind::unit);
    EXPECT_NE(std::string(e.what()).find("orbit.altitude"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("t.scn:6"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("km"), std::string::npos) << e.what();
}

TEST(ScenarioFile, WrongOrSpuriousUnit) {
    EXPECT_EQ(parse_error(replace(minimal_qkd, "altitude = 500 km", "altitude = 500 Hz")).kind(), ErrorKind::unit);
    EXPECT_EQ(parse_error(replace(minimal_qkd, "efficiency = 0.5", "efficiency = 0.5 dB")).kind(), ErrorKind::unit);
}

TEST(ScenarioFile, UnknownKeySuggestsNearest) {
    const auto e = parse_error(replace(minimal_qkd, "[orbit]\n", "[orbit]\nfoo = 1\n"));
    EXPECT_EQ(e.kind(), ErrorKind::validation);
    EXPECT_NE(std::string(e.what()).find("'foo'"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("nearest known key"), std::string::npos) << e.what();

    const auto typo = parse_error(replace(minimal_qkd, "altitude = 500 km", "altitud = 500 km"));
    EXPECT_NE(std::string(typo.what()).find("'altitude'"), std::string::npos) << typo.what();
}

TEST(ScenarioFile, StructuralErrors) {
    EXPECT_EQ(parse_error(replace(minimal_qkd, "[orbit]", "[orbits]")).kind(), ErrorKind::validation);
    EXPECT_EQ(parse_error(replace(minimal_qkd, "name = t\n", "name = t\nname = u\n")).kind(), ErrorKind::validation);
    EXPECT_EQ(parse_error(replace(minimal_qkd, "[seeds]\nmaster = 3\n", "")).kind(), ErrorKind::validation);
    EXPECT_EQ(parse_error(replace(minimal_qkd, "downlink-qkd", "relay-exchange")).kind(), ErrorKind::validation);
    EXPECT_EQ(parse_error(replace(minimal_qkd, "downlink-qkd", "downlink")).kind(), ErrorKind::validation);
    EXPECT_EQ(parse_error(replace(minimal_qkd, "efficiency = 0.5", "efficiency = 1.5")).kind(), ErrorKind::validation);
    EXPECT_EQ(parse_error(replace(minimal_qkd, "altitude = 500 km", "altitude 500 km")).kind(), ErrorKind::parse);
}

TEST(ScenarioFile, PresetDirOverride) {
    const auto dir = std::filesystem::temp_directory_path() / "skylink_preset_override";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "only-one.scn") << minimal_qkd;
    ::setenv("SKYLINK_PRESET_DIR", dir.c_str(), 1);
    EXPECT_EQ(list_presets(), std::vector<std::string>{"only-one"});
    EXPECT_EQ(load_preset("only-one").seeds.master, 3u);
    try {
        find_preset("micius-qkd-xinglong");
        ADD_FAILURE();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::io);
        EXPECT_NE(std::string(e.what()).find("only-one"), std::string::npos);
    }
    ::unsetenv("SKYLINK_PRESET_DIR");
    EXPECT_GT(list_presets().size(), 1u);
    std::filesystem::remove_all(dir);
}

TEST(DualPass, CommonWindowForDelinghaLijiang) {
    const auto s = load_preset("micius-entanglement-dlh-ljg");
    const auto track = generate_dual_pass(s.orbit_spec(), s.stations[0].site, s.stations[1].site, 1203.0);
    EXPECT_NEAR(track.duration_s, 275.0, 0.2 * 275.0);
    for (const auto& p : track.samples) {
        EXPECT_GE(p.elevation_a_deg, 10.0 - 1e-6);
        EXPECT_GE(p.elevation_b_deg, 10.0 - 1e-6);
        EXPECT_GT(p.range_a_km + p.range_b_km, 1200.0);
    }
    EXPECT_THROW(generate_dual_pass(s.orbit_spec(), s.stations[0].site, s.stations[1].site, 6000.0), Error);
}
