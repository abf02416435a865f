#pragma once

// Satellite pass geometry over ground stations: spherical, non-rotating Earth,
// circular orbits, passes parameterized by peak elevation.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include "constants.hpp"
#include "error.hpp"
#include "rng.hpp"

namespace skylink {

struct GroundStation {
    std::string name;
    double latitude_deg = 0.0;
    double altitude_m = 0.0;
    double min_elevation_deg = 10.0;

    void validate() const {
        require(latitude_deg >= -90.0 && latitude_deg <= 90.0, ErrorKind::domain,
                "station '" + name + "': latitude outside [-90, 90]");
        require(min_elevation_deg >= 0.0 && min_elevation_deg < 90.0, ErrorKind::domain,
                "station '" + name + "': min_elevation outside [0, 90)");
    }

    bool operator==(const GroundStation&) const = default;
};

struct OrbitSpec {
    double altitude_km = 500.0;
    double inclination_deg = 97.4;
    double earth_radius_km = constants::earth_radius_km;

    void validate() const {
        require(altitude_km > 0.0, ErrorKind::domain, "orbit altitude must be positive");
    }

    double radius_km() const { return earth_radius_km + altitude_km; }

    double period_s() const {
        const double a = radius_km();
        return 2.0 * constants::pi * std::sqrt(a * a * a / constants::earth_mu_km);
    }

    double speed_km_s() const { return std::sqrt(constants::earth_mu_km / radius_km()); }

    /// Orbital angular velocity about the Earth centre, rad/s.
    double angular_velocity() const { return 2.0 * constants::pi / period_s(); }

    bool operator==(const OrbitSpec&) const = default;
};

struct PassSample {
    double t_s = 0.0;
    double elevation_deg = 0.0;
    double azimuth_deg = 0.0;
    double range_km = 0.0;
    double rate_mrad_s = 0.0;
    double accel_mrad_s2 = 0.0;
};

struct PassTrack {
    GroundStation station;
    OrbitSpec orbit;
    std::vector<PassSample> samples;
    double duration_s = 0.0;
    double max_elevation_deg = 0.0;
};

/// Slant range (km) from a station to a satellite at altitude `altitude_km`
/// seen at `elevation_deg`.
inline double slant_range_km(double altitude_km, double elevation_deg,
                             double earth_radius_km = constants::earth_radius_km) {
    require(altitude_km > 0.0, ErrorKind::domain, "altitude must be positive");
    require(elevation_deg >= 0.0 && elevation_deg <= 90.0, ErrorKind::domain,
            "elevation outside [0, 90] degrees");
    if (elevation_deg == 90.0) return altitude_km;
    const double s = std::sin(elevation_deg * constants::deg_to_rad);
    const double q = altitude_km / earth_radius_km;
    // Rationalized form of re * (sqrt(s^2 + 2q + q^2) - s); no cancellation near zenith.
    return earth_radius_km * q * (2.0 + q) / (std::sqrt(s * s + 2.0 * q + q * q) + s);
}

/// Earth-central angle between the station and the sub-satellite point when
/// the satellite is seen at `elevation_deg`.
inline double central_angle_rad(double altitude_km, double elevation_deg,
                                double earth_radius_km = constants::earth_radius_km) {
    const double el = elevation_deg * constants::deg_to_rad;
    return std::acos(earth_radius_km * std::cos(el) / (earth_radius_km + altitude_km)) - el;
}

/// Elevation (deg) for a sub-satellite point `central_angle` rad away.
inline double elevation_from_central_angle(double altitude_km, double central_angle,
                                           double earth_radius_km = constants::earth_radius_km) {
    const double rho = earth_radius_km / (earth_radius_km + altitude_km);
    return std::atan2(std::cos(central_angle) - rho, std::sin(central_angle)) * constants::rad_to_deg;
}

namespace detail {

using Vec3 = std::array<double, 3>;

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

// Local frame: station on the +z axis, orbit plane tilted about x so the
// closest approach lies `cross_track` rad from the zenith.
struct PassKinematics {
    double radius;      // km
    double re;          // km
    double omega;       // rad/s
    double cross_track; // rad

    Vec3 satellite(double t) const {
        const double phi = omega * t;
        return {radius * std::sin(phi), radius * std::cos(phi) * std::sin(cross_track),
                radius * std::cos(phi) * std::cos(cross_track)};
    }

    Vec3 velocity(double t) const {
        const double phi = omega * t;
        const double v = radius * omega;
        return {v * std::cos(phi), -v * std::sin(phi) * std::sin(cross_track),
                -v * std::sin(phi) * std::cos(cross_track)};
    }

    Vec3 line_of_sight(double t) const {
        Vec3 r = satellite(t);
        r[2] -= re;
        return r;
    }

    /// Angular rate of the line of sight, rad/s.
    double los_rate(double t) const {
        const Vec3 los = line_of_sight(t);
        const Vec3 v = velocity(t);
        const double range = norm(los);
        const double radial = dot(v, los) / range;
        const double v2 = dot(v, v) - radial * radial;
        return std::sqrt(std::max(v2, 0.0)) / range;
    }
};

} // namespace detail

/// Symmetric pass whose peak elevation is `max_elevation_deg`, sampled every
/// `dt_s` seconds between rise and set at the station's elevation cutoff.
inline PassTrack generate_pass(const OrbitSpec& orbit, const GroundStation& station, double max_elevation_deg,
                               double dt_s = 1.0) {
    orbit.validate();
    station.validate();
    require(dt_s > 0.0, ErrorKind::domain, "sample spacing must be positive");
    require(max_elevation_deg <= 90.0, ErrorKind::domain, "peak elevation above 90 degrees");
    if (max_elevation_deg < station.min_elevation_deg) {
        throw Error(ErrorKind::no_visibility, "peak elevation " + std::to_string(max_elevation_deg) +
                                                  " deg is below the cutoff of station '" + station.name + "'");
    }

    const double h = orbit.altitude_km;
    const double re = orbit.earth_radius_km;
    const double cross = central_angle_rad(h, max_elevation_deg, re);
    const double horizon = central_angle_rad(h, station.min_elevation_deg, re);
    const double half_arc = std::acos(std::clamp(std::cos(horizon) / std::cos(cross), -1.0, 1.0));
    const double omega = orbit.angular_velocity();
    const double half_duration = half_arc / omega;

    detail::PassKinematics kin{re + h, re, omega, cross};

    PassTrack track;
    track.station = station;
    track.orbit = orbit;
    track.duration_s = 2.0 * half_duration;
    track.max_elevation_deg = max_elevation_deg;

    const auto count = static_cast<std::size_t>(std::floor(track.duration_s / dt_s + 1e-9)) + 1;
    track.samples.reserve(count);
    const double fd = 1e-3;
    for (std::size_t k = 0; k < count; ++k) {
        const double t = static_cast<double>(k) * dt_s;
        const double tc = t - half_duration;
        const auto los = kin.line_of_sight(tc);
        const double range = detail::norm(los);
        PassSample s;
        s.t_s = t;
        s.elevation_deg = std::clamp(std::asin(los[2] / range) * constants::rad_to_deg, 0.0, 90.0);
        s.azimuth_deg = std::atan2(los[0], los[1]) * constants::rad_to_deg;
        s.range_km = slant_range_km(h, s.elevation_deg, re);
        s.rate_mrad_s = kin.los_rate(tc) * 1e3;
        s.accel_mrad_s2 = (kin.los_rate(tc + fd) - kin.los_rate(tc - fd)) / (2.0 * fd) * 1e3;
        track.samples.push_back(s);
    }
    return track;
}

struct DualPassSample {
    double t_s = 0.0;
    double elevation_a_deg = 0.0;
    double range_a_km = 0.0;
    double elevation_b_deg = 0.0;
    double range_b_km = 0.0;
};

struct DualPassTrack {
    GroundStation station_a;
    GroundStation station_b;
    OrbitSpec orbit;
    std::vector<DualPassSample> samples;
    double duration_s = 0.0;
};

/// Pass seen simultaneously from two stations `baseline_km` apart (surface
/// arc) whose baseline lies along the ground track, both `cross_track_km` off
/// it. Samples cover the interval where both stations are above their cutoffs.
inline DualPassTrack generate_dual_pass(const OrbitSpec& orbit, const GroundStation& a, const GroundStation& b,
                                        double baseline_km, double cross_track_km = 0.0, double dt_s = 1.0) {
    orbit.validate();
    a.validate();
    b.validate();
    require(baseline_km > 0.0, ErrorKind::domain, "baseline must be positive");
    require(dt_s > 0.0, ErrorKind::domain, "sample spacing must be positive");
    const double re = orbit.earth_radius_km;
    const double h = orbit.altitude_km;
    const double beta = baseline_km / re;
    const double gamma = cross_track_km / re;
    auto half_window = [&](const GroundStation& s) {
        const double c = std::cos(central_angle_rad(h, s.min_elevation_deg, re)) / std::cos(gamma);
        if (c > 1.0) {
            throw Error(ErrorKind::no_visibility, "station '" + s.name + "' never rises above its cutoff");
        }
        return std::acos(c);
    };
    const double lo = std::max(-0.5 * beta - half_window(a), 0.5 * beta - half_window(b));
    const double hi = std::min(-0.5 * beta + half_window(a), 0.5 * beta + half_window(b));
    if (hi <= lo) throw Error(ErrorKind::no_visibility, "stations are never in common view");

    const double omega = orbit.angular_velocity();
    auto station_vec = [&](double along) {
        return detail::Vec3{re * std::sin(along) * std::cos(gamma), re * std::sin(gamma),
                            re * std::cos(along) * std::cos(gamma)};
    };
    const detail::Vec3 pa = station_vec(-0.5 * beta);
    const detail::Vec3 pb = station_vec(0.5 * beta);
    auto look = [&](const detail::Vec3& p, const detail::Vec3& sat, double& el, double& range) {
        const detail::Vec3 los{sat[0] - p[0], sat[1] - p[1], sat[2] - p[2]};
        range = detail::norm(los);
        el = std::clamp(std::asin(detail::dot(los, p) / (range * re)) * constants::rad_to_deg, 0.0, 90.0);
    };

    DualPassTrack track;
    track.station_a = a;
    track.station_b = b;
    track.orbit = orbit;
    track.duration_s = (hi - lo) / omega;
    const auto count = static_cast<std::size_t>(std::floor(track.duration_s / dt_s + 1e-9)) + 1;
    for (std::size_t k = 0; k < count; ++k) {
        const double t = static_cast<double>(k) * dt_s;
        const double phi = lo + omega * t;
        const detail::Vec3 sat{orbit.radius_km() * std::sin(phi), 0.0, orbit.radius_km() * std::cos(phi)};
        DualPassSample s;
        s.t_s = t;
        look(pa, sat, s.elevation_a_deg, s.range_a_km);
        look(pb, sat, s.elevation_b_deg, s.range_b_km);
        track.samples.push_back(s);
    }
    return track;
}

struct AngularDynamics {
    double max_rate_mrad_s = 0.0;
    double max_accel_mrad_s2 = 0.0;
};

/// Finite-difference maxima of the line-of-sight angular rate and its
/// derivative, from the sampled azimuth/elevation track.
inline AngularDynamics angular_dynamics(const PassTrack& track) {
    const auto& s = track.samples;
    require(s.size() >= 3, ErrorKind::insufficient_samples, "angular dynamics needs at least 3 samples");

    auto unit = [](const PassSample& p) {
        const double el = p.elevation_deg * constants::deg_to_rad;
        const double az = p.azimuth_deg * constants::deg_to_rad;
        return detail::Vec3{std::cos(el) * std::sin(az), std::cos(el) * std::cos(az), std::sin(el)};
    };

    std::vector<double> rates;
    rates.reserve(s.size() - 1);
    for (std::size_t k = 0; k + 1 < s.size(); ++k) {
        const double dt = s[k + 1].t_s - s[k].t_s;
        const double c = std::clamp(detail::dot(unit(s[k]), unit(s[k + 1])), -1.0, 1.0);
        rates.push_back(std::acos(c) / dt * 1e3);
    }
    AngularDynamics out;
    for (std::size_t k = 0; k < rates.size(); ++k) {
        out.max_rate_mrad_s = std::max(out.max_rate_mrad_s, rates[k]);
        if (k + 1 < rates.size()) {
            const double dt = 0.5 * (s[k + 2].t_s - s[k].t_s);
            out.max_accel_mrad_s2 = std::max(out.max_accel_mrad_s2, std::abs(rates[k + 1] - rates[k]) / dt);
        }
    }
    return out;
}

enum class NightSide { ascending, descending, any };

struct PassStatisticsOptions {
    std::uint64_t seed = 1;
    NightSide night_side = NightSide::ascending;
    unsigned workers = 1;
};

struct PassStatistics {
    double passes_per_day = 0.0;
    double mean_duration_s = 0.0;
    std::uint64_t total_passes = 0;
};

namespace detail {

struct DayTally {
    std::uint64_t passes = 0;
    double duration_sum = 0.0;
};

inline DayTally simulate_day(const std::vector<OrbitSpec>& constellation, const GroundStation& station,
                             std::uint64_t seed, NightSide night) {
    Rng rng(seed);
    DayTally tally;
    const double lat = station.latitude_deg * constants::deg_to_rad;
    const Vec3 site{std::cos(lat), 0.0, std::sin(lat)};
    const double earth_rate = 2.0 * constants::pi / constants::seconds_per_day;

    for (const auto& orbit : constellation) {
        const double period = orbit.period_s();
        const double horizon = central_angle_rad(orbit.altitude_km, station.min_elevation_deg, orbit.earth_radius_km);
        const double inc = orbit.inclination_deg * constants::deg_to_rad;
        const double node0 = 2.0 * constants::pi * rng.uniform();
        const double phase0 = rng.uniform();
        for (int m = 0;; ++m) {
            const double t = (phase0 + m) * period;
            if (t >= constants::seconds_per_day) break;
            // Ground-track drift between successive orbits.
            const double node = node0 - earth_rate * t;
            const Vec3 normal{std::sin(inc) * std::sin(node), -std::sin(inc) * std::cos(node), std::cos(inc)};
            const double offset = std::asin(std::clamp(std::abs(dot(normal, site)), 0.0, 1.0));
            if (offset >= horizon) continue;
            if (night != NightSide::any) {
                const double ns = dot(normal, site);
                Vec3 p{site[0] - ns * normal[0], site[1] - ns * normal[1], site[2] - ns * normal[2]};
                // Direction of motion at closest approach: normal x p.
                const double northward = normal[0] * p[1] - normal[1] * p[0];
                if ((night == NightSide::ascending) != (northward > 0.0)) continue;
            }
            const double half_arc = std::acos(std::clamp(std::cos(horizon) / std::cos(offset), -1.0, 1.0));
            ++tally.passes;
            tally.duration_sum += 2.0 * half_arc / (2.0 * constants::pi) * period;
        }
    }
    return tally;
}

} // namespace detail

/// Mean passes per day and mean pass duration above the station cutoff for a
/// constellation with randomized node and phase each day. Day `d` draws from
/// derive_seed(seed, d), so results do not depend on the worker count.
inline PassStatistics pass_statistics(const std::vector<OrbitSpec>& constellation, const GroundStation& station,
                                      int days, const PassStatisticsOptions& options = {}) {
    require(days >= 1, ErrorKind::domain, "pass statistics need at least one day");
    station.validate();
    for (const auto& o : constellation) o.validate();

    std::vector<detail::DayTally> per_day(static_cast<std::size_t>(days));
    const unsigned workers = std::max(1u, std::min<unsigned>(options.workers, static_cast<unsigned>(days)));
    auto run = [&](unsigned w) {
        for (int d = static_cast<int>(w); d < days; d += static_cast<int>(workers)) {
            per_day[static_cast<std::size_t>(d)] = detail::simulate_day(
                constellation, station, derive_seed(options.seed, static_cast<std::uint64_t>(d)), options.night_side);
        }
    };
    if (workers == 1) {
        run(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
        for (auto& t : pool) t.join();
    }

    PassStatistics out;
    double duration_sum = 0.0;
    for (const auto& d : per_day) {
        out.total_passes += d.passes;
        duration_sum += d.duration_sum;
    }
    out.passes_per_day = static_cast<double>(out.total_passes) / days;
    out.mean_duration_s = out.total_passes ? duration_sum / static_cast<double>(out.total_passes) : 0.0;
    return out;
}

} // namespace skylink
