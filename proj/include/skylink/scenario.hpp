#pragma once

// In-memory scenario description. All quantities are stored in SI units
// except angles that the geometry code takes in degrees.

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "link_budget.hpp"
#include "pass_geometry.hpp"
#include "photonics.hpp"
#include "teleport.hpp"

namespace skylink {

enum class MissionKind {
    downlink_qkd,
    two_downlink_entanglement,
    uplink_teleportation,
    relay_exchange,
    gravity_test,
    constellation_plan,
};

inline constexpr std::array<std::pair<MissionKind, std::string_view>, 6> mission_kind_names{{
    {MissionKind::downlink_qkd, "downlink-qkd"},
    {MissionKind::two_downlink_entanglement, "two-downlink-entanglement"},
    {MissionKind::uplink_teleportation, "uplink-teleportation"},
    {MissionKind::relay_exchange, "relay-exchange"},
    {MissionKind::gravity_test, "gravity-test"},
    {MissionKind::constellation_plan, "constellation-plan"},
}};

inline std::string_view to_string(MissionKind k) {
    for (const auto& [kind, name] : mission_kind_names) {
        if (kind == k) return name;
    }
    return "?";
}

enum class SourceType { wcp, spdc };

struct MissionSection {
    MissionKind kind = MissionKind::downlink_qkd;
    std::string name = "scenario";
    double max_elevation_deg = 80.0; // peak of the simulated pass
    double step_s = 1.0;
    int passes = 1;
    double baseline_m = 1.203e6;  // two-station missions
    double cross_track_m = 0.0;
    double duration_s = 300.0;    // fixed-loss links only
    unsigned workers = 1;

    bool operator==(const MissionSection&) const = default;
};

struct OrbitSection {
    double altitude_m = 500e3;
    double inclination_deg = 97.4;
    int satellites = 1;

    bool operator==(const OrbitSection&) const = default;
};

struct StationConfig {
    GroundStation site;
    double aperture_m = 1.0;
    double receiver_efficiency = 1.0; // telescope optics and coupling, detector excluded
    double pointing_jitter_rad = 0.0;
    double zenith_transmittance = 0.5;
    double background_cps = 500.0;

    bool operator==(const StationConfig&) const = default;
};

struct SourceSection {
    SourceType type = SourceType::wcp;
    double rep_rate_hz = 100e6;
    std::vector<double> intensities{0.8, 0.1, 0.0};
    std::vector<double> probabilities{0.5, 0.25, 0.25};
    double basis_bias = 0.5;
    double pair_rate_hz = 5.9e6;
    double fidelity = 0.907;
    double wavelength_m = 850e-9;
    double divergence_rad = 10e-6;
    double transmitter_efficiency = 1.0;

    bool operator==(const SourceSection&) const = default;
};

struct DetectorSection {
    double efficiency = 0.5;
    double dark_rate_cps = 100.0;
    double dead_time_s = 50e-9;
    double jitter_s = 529e-12;
    double window_s = 2e-9;

    bool operator==(const DetectorSection&) const = default;
};

struct AtmosphereSection {
    double rytov_variance = 0.0;
    double fresnel_ratio = 0.0;
    double background_scale = 1.0;
    std::optional<double> fixed_loss_db; // replaces the computed budget when set

    bool operator==(const AtmosphereSection&) const = default;
};

struct ProtocolSection {
    double misalignment = 0.01;
    double f_ec = 1.16;
    double epsilon = 1e-9;
    BsmMode bsm_mode = BsmMode::linear_optics;
    double bsm_visibility = 1.0;
    double key_budget_bits = 800e3;
    std::vector<double> payload_bits{42720.0, 39200.0};
    double reference_angle_deg = 50.0;
    double reference_decorrelation = 0.97;
    double injected_decorrelation = 1.0;
    double key_per_pass_bits = 0.0; // 0: derive from a downlink run
    double passes_per_year = 50.0;
    int stations_served = 100;
    int days = 365;

    bool operator==(const ProtocolSection&) const = default;
};

struct SeedSection {
    std::uint64_t master = 1;

    bool operator==(const SeedSection&) const = default;
};

struct Scenario {
    MissionSection mission;
    OrbitSection orbit;
    std::vector<StationConfig> stations;
    SourceSection source;
    DetectorSection detectors;
    AtmosphereSection atmosphere;
    ProtocolSection protocol;
    SeedSection seeds;

    bool operator==(const Scenario&) const = default;

    OrbitSpec orbit_spec() const { return {orbit.altitude_m / 1e3, orbit.inclination_deg}; }

    DetectorModel detector_model() const {
        DetectorModel d;
        d.efficiency = detectors.efficiency;
        d.dark_rate_cps = detectors.dark_rate_cps;
        d.dead_time_s = detectors.dead_time_s;
        return d;
    }

    SyncModel sync_model() const {
        const double rate = source.type == SourceType::wcp ? source.rep_rate_hz : 100e6;
        return {rate, detectors.jitter_s, detectors.window_s};
    }

    WcpSource wcp_source() const {
        WcpSource w;
        w.rep_rate_hz = source.rep_rate_hz;
        for (std::size_t i = 0; i < 3; ++i) {
            w.intensities[i] = source.intensities.at(i);
            w.probabilities[i] = source.probabilities.at(i);
        }
        w.basis_bias = source.basis_bias;
        w.wavelength_m = source.wavelength_m;
        return w;
    }

    SpdcSource spdc_source() const { return {source.pair_rate_hz, source.fidelity, source.wavelength_m}; }

    /// Satellite-to-station (or station-to-satellite) optics for station `i`.
    /// The detector efficiency is applied separately by the protocols.
    LinkConfig link_config(std::size_t i) const {
        const StationConfig& st = stations.at(i);
        LinkConfig cfg;
        cfg.chain = OpticalChain{source.transmitter_efficiency, st.receiver_efficiency, 1.0, 1.0, 1.0};
        cfg.beam = BeamParams::from_divergence(source.wavelength_m, source.divergence_rad);
        if (atmosphere.rytov_variance > 0.0) {
            cfg.turbulence = TurbulenceModel{atmosphere.rytov_variance, atmosphere.fresnel_ratio};
        }
        cfg.pointing = PointingModel{st.pointing_jitter_rad};
        cfg.atmosphere.bands = {{source.wavelength_m, st.zenith_transmittance}};
        cfg.aperture_diameter_m = st.aperture_m;
        cfg.geometry = GeometryModel::gaussian;
        return cfg;
    }

    double background_cps(std::size_t i) const { return stations.at(i).background_cps * atmosphere.background_scale; }

    /// Structural checks that do not depend on the mission kind.
    void validate() const {
        require(!mission.name.empty(), ErrorKind::validation, "mission.name must not be empty");
        require(mission.step_s > 0.0, ErrorKind::validation, "mission.step must be positive");
        require(mission.passes >= 1, ErrorKind::validation, "mission.passes must be at least 1");
        require(mission.workers >= 1, ErrorKind::validation, "mission.workers must be at least 1");
        require(mission.max_elevation_deg > 0.0 && mission.max_elevation_deg <= 90.0, ErrorKind::validation,
                "mission.max_elevation outside (0, 90] deg");
        require(orbit.altitude_m > 0.0, ErrorKind::validation, "orbit.altitude must be positive");
        require(orbit.satellites >= 1, ErrorKind::validation, "orbit.satellites must be at least 1");
        for (const auto& st : stations) {
            require(!st.site.name.empty(), ErrorKind::validation, "stations.name must not be empty");
            st.site.validate();
            require(st.aperture_m > 0.0, ErrorKind::validation, "stations.aperture must be positive");
            require(st.receiver_efficiency > 0.0 && st.receiver_efficiency <= 1.0, ErrorKind::validation,
                    "stations.receiver_efficiency outside (0, 1]");
            require(st.zenith_transmittance > 0.0 && st.zenith_transmittance <= 1.0, ErrorKind::validation,
                    "stations.zenith_transmittance outside (0, 1]");
            require(st.background_cps >= 0.0, ErrorKind::validation, "stations.background must be non-negative");
        }
        require(source.intensities.size() == 3 && source.probabilities.size() == 3, ErrorKind::validation,
                "source.intensities and source.probabilities need three entries");
        if (source.type == SourceType::wcp) wcp_source().validate();
        require(source.pair_rate_hz >= 0.0, ErrorKind::validation, "source.pair_rate must be non-negative");
        require(source.fidelity >= 0.25 && source.fidelity <= 1.0, ErrorKind::validation,
                "source.fidelity outside [0.25, 1]");
        require(source.divergence_rad > 0.0, ErrorKind::validation, "source.divergence must be positive");
        require(source.transmitter_efficiency > 0.0 && source.transmitter_efficiency <= 1.0, ErrorKind::validation,
                "source.transmitter_efficiency outside (0, 1]");
        require(detectors.efficiency > 0.0 && detectors.efficiency <= 1.0, ErrorKind::validation,
                "detectors.efficiency outside (0, 1]");
        require(detectors.window_s > 0.0, ErrorKind::validation, "detectors.window must be positive");
        require(protocol.f_ec >= 1.0, ErrorKind::validation, "protocol.f_ec must be at least 1");
        require(protocol.epsilon > 0.0 && protocol.epsilon < 1.0, ErrorKind::validation,
                "protocol.epsilon outside (0, 1)");
        require(protocol.bsm_visibility >= 0.0 && protocol.bsm_visibility <= 1.0, ErrorKind::validation,
                "protocol.bsm_visibility outside [0, 1]");
        require(protocol.injected_decorrelation >= 0.0 && protocol.injected_decorrelation <= 1.0,
                ErrorKind::validation, "protocol.injected_decorrelation outside [0, 1]");

        const std::size_t n = stations.size();
        switch (mission.kind) {
        case MissionKind::downlink_qkd:
        case MissionKind::constellation_plan:
            require(n >= 1, ErrorKind::validation, std::string(to_string(mission.kind)) + " needs a station");
            require(source.type == SourceType::wcp, ErrorKind::validation,
                    std::string(to_string(mission.kind)) + " needs source.type = wcp");
            break;
        case MissionKind::relay_exchange:
            require(n == 2, ErrorKind::validation, "relay-exchange needs exactly two stations");
            require(source.type == SourceType::wcp, ErrorKind::validation, "relay-exchange needs source.type = wcp");
            break;
        case MissionKind::two_downlink_entanglement:
            require(n == 2, ErrorKind::validation, "two-downlink-entanglement needs exactly two stations");
            require(source.type == SourceType::spdc, ErrorKind::validation,
                    "two-downlink-entanglement needs source.type = spdc");
            break;
        case MissionKind::uplink_teleportation:
        case MissionKind::gravity_test:
            require(n == 1, ErrorKind::validation, std::string(to_string(mission.kind)) + " needs exactly one station");
            require(source.type == SourceType::spdc, ErrorKind::validation,
                    std::string(to_string(mission.kind)) + " needs source.type = spdc");
            break;
        }
    }
};

} // namespace skylink
