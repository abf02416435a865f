#pragma once

// Free-space optical channel attenuation between a satellite and a ground
// station: eta = eta_t * eta_r * eta_d * eta_at * eta_p * eta_as.

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "constants.hpp"
#include "error.hpp"
#include "numeric.hpp"

namespace skylink {

struct BeamParams {
    double wavelength_m = 850e-9;
    double waist_m = 27.06e-3;

    void validate() const {
        require(wavelength_m > 0.0, ErrorKind::domain, "beam wavelength must be positive");
        require(waist_m > 0.0, ErrorKind::domain, "beam waist must be positive");
    }

    double rayleigh_range_m() const { return constants::pi * waist_m * waist_m / wavelength_m; }

    /// Far-field divergence half-angle, rad.
    double divergence_rad() const { return wavelength_m / (constants::pi * waist_m); }

    static BeamParams from_divergence(double wavelength_m, double divergence_rad) {
        require(divergence_rad > 0.0, ErrorKind::domain, "divergence must be positive");
        return {wavelength_m, wavelength_m / (constants::pi * divergence_rad)};
    }

    /// Waist whose intensity FWHM is half the transmitting telescope diameter.
    static BeamParams from_telescope(double wavelength_m, double telescope_diameter_m) {
        const double fwhm = 0.5 * telescope_diameter_m;
        return {wavelength_m, fwhm / std::sqrt(2.0 * std::log(2.0))};
    }

    bool operator==(const BeamParams&) const = default;
};

struct TurbulenceModel {
    double rytov_variance = 0.0;
    double fresnel_ratio = 0.0;

    void validate() const {
        require(rytov_variance >= 0.0, ErrorKind::domain, "Rytov variance must be non-negative");
        require(fresnel_ratio >= 0.0, ErrorKind::domain, "Fresnel ratio must be non-negative");
    }

    /// Long-term spot broadening term omega_a.
    double broadening() const { return 1.33 * rytov_variance * std::pow(fresnel_ratio, 5.0 / 6.0); }

    bool operator==(const TurbulenceModel&) const = default;
};

/// Hufnagel-Valley Cn^2 profile (m^-2/3) at height `h_m` above ground.
inline double hufnagel_valley_cn2(double h_m, double wind_rms_m_s = 21.0, double ground_cn2 = 1.7e-14) {
    const double w = wind_rms_m_s / 27.0;
    return 0.00594 * w * w * std::pow(1e-5 * h_m, 10.0) * std::exp(-h_m / 1000.0) +
           2.7e-16 * std::exp(-h_m / 1500.0) + ground_cn2 * std::exp(-h_m / 100.0);
}

/// Plane-wave Rytov variance along a slant path from a station at
/// `station_altitude_m` through the turbulent layer (up to 20 km).
inline double rytov_variance_slant(double wavelength_m, double elevation_deg, double station_altitude_m = 0.0,
                                   double wind_rms_m_s = 21.0, double ground_cn2 = 1.7e-14) {
    require(elevation_deg > 0.0 && elevation_deg <= 90.0, ErrorKind::domain, "elevation outside (0, 90]");
    const double k = 2.0 * constants::pi / wavelength_m;
    const double zenith = (90.0 - elevation_deg) * constants::deg_to_rad;
    const double top = 20000.0;
    auto integrand = [&](double h) {
        const double above = h - station_altitude_m;
        return hufnagel_valley_cn2(h, wind_rms_m_s, ground_cn2) * std::pow(std::max(above, 0.0), 5.0 / 6.0);
    };
    const double integral = adaptive_simpson(integrand, station_altitude_m, top, 1e-8);
    return 2.25 * std::pow(k, 7.0 / 6.0) * std::pow(1.0 / std::cos(zenith), 11.0 / 6.0) * integral;
}

/// Tracking error expressed as an angle; the jitter at the receiver plane
/// scales with range.
struct PointingModel {
    double jitter_rad = 0.0;

    double jitter_m(double range_m) const { return jitter_rad * range_m; }

    bool operator==(const PointingModel&) const = default;
};

struct AtmosphereModel {
    struct Band {
        double wavelength_m = 850e-9;
        double zenith_transmittance = 0.5;
        bool operator==(const Band&) const = default;
    };

    std::vector<Band> bands{Band{}};
    std::string visibility = "clear-night";

    void validate() const {
        require(!bands.empty(), ErrorKind::domain, "atmosphere needs at least one band");
        for (const auto& b : bands) {
            require(b.zenith_transmittance > 0.0 && b.zenith_transmittance <= 1.0, ErrorKind::domain,
                    "zenith transmittance outside (0, 1]");
        }
    }

    /// Zenith transmittance of the band nearest to `wavelength_m`.
    double zenith_transmittance(double wavelength_m) const {
        validate();
        const Band* best = &bands.front();
        for (const auto& b : bands) {
            if (std::abs(b.wavelength_m - wavelength_m) < std::abs(best->wavelength_m - wavelength_m)) best = &b;
        }
        return best->zenith_transmittance;
    }

    bool operator==(const AtmosphereModel&) const = default;
};

struct OpticalChain {
    double transmitter = 1.0;
    double receiver = 1.0;
    double coupling = 1.0;
    double detector = 1.0;
    double mispointing = 1.0;

    void validate() const {
        for (double e : {transmitter, receiver, coupling, detector, mispointing}) {
            require(e > 0.0 && e <= 1.0, ErrorKind::domain, "optical chain efficiency outside (0, 1]");
        }
    }

    bool operator==(const OpticalChain&) const = default;
};

enum class GeometryModel {
    gaussian,         // Gaussian spot captured by a circular aperture
    far_field_approx, // 2 (D / (theta Z))^2, capped at 1
};

struct LinkBudget {
    double transmitter = 1.0; // eta_t
    double receiver = 1.0;    // eta_r
    double diffraction = 1.0; // eta_d
    double turbulence = 1.0;  // eta_at
    double pointing = 1.0;    // eta_p
    double atmosphere = 1.0;  // eta_as

    struct Term {
        std::string_view name;
        double efficiency;
    };

    std::array<Term, 6> terms() const {
        return {{{"transmitter", transmitter},
                 {"receiver", receiver},
                 {"diffraction", diffraction},
                 {"turbulence", turbulence},
                 {"pointing", pointing},
                 {"atmosphere", atmosphere}}};
    }

    double total() const { return transmitter * receiver * diffraction * turbulence * pointing * atmosphere; }
    double total_db() const { return to_db(total()); }

    /// Budget of two independent links used in coincidence (two-downlink).
    static LinkBudget combine(const LinkBudget& a, const LinkBudget& b) {
        return {a.transmitter * b.transmitter, a.receiver * b.receiver, a.diffraction * b.diffraction,
                a.turbulence * b.turbulence,   a.pointing * b.pointing, a.atmosphere * b.atmosphere};
    }

    /// Budget with every loss in a single term (measured attenuation).
    static LinkBudget from_total(double efficiency) {
        require(efficiency > 0.0 && efficiency <= 1.0, ErrorKind::domain, "efficiency outside (0, 1]");
        LinkBudget b;
        b.diffraction = efficiency;
        return b;
    }
};

/// Gaussian spot radius at distance z, optionally broadened by turbulence.
inline double beam_radius_at(const BeamParams& beam, double z_m,
                             const std::optional<TurbulenceModel>& turbulence = std::nullopt) {
    beam.validate();
    require(z_m >= 0.0, ErrorKind::domain, "propagation distance must be non-negative");
    const double ratio = z_m / beam.rayleigh_range_m();
    const double vacuum = beam.waist_m * std::sqrt(1.0 + ratio * ratio);
    if (!turbulence) return vacuum;
    turbulence->validate();
    return vacuum * std::sqrt(1.0 + turbulence->broadening());
}

/// Fraction of a Gaussian spot of radius `spot_radius_m` collected by an
/// aperture of radius `aperture_radius_m`.
inline double aperture_collection(double spot_radius_m, double aperture_radius_m) {
    require(spot_radius_m > 0.0, ErrorKind::domain, "spot radius must be positive");
    require(aperture_radius_m >= 0.0, ErrorKind::domain, "aperture radius must be non-negative");
    if (std::isinf(aperture_radius_m)) return 1.0;
    return -std::expm1(-2.0 * aperture_radius_m * aperture_radius_m / (spot_radius_m * spot_radius_m));
}

/// Expected mispointing efficiency for Gaussian jitter sigma_p at the receiver.
inline double pointing_efficiency(double spot_radius_m, const PointingModel& pointing, double range_m) {
    require(spot_radius_m > 0.0, ErrorKind::domain, "spot radius must be positive");
    const double sigma = pointing.jitter_m(range_m);
    require(sigma >= 0.0, ErrorKind::domain, "pointing jitter must be non-negative");
    const double w2 = spot_radius_m * spot_radius_m;
    return w2 / (w2 + 4.0 * sigma * sigma);
}

inline double pointing_efficiency(double spot_radius_m, double jitter_m) {
    return pointing_efficiency(spot_radius_m, PointingModel{jitter_m}, 1.0);
}

/// Plane-parallel airmass scaling of the zenith transmittance.
inline double atmospheric_transmittance(const AtmosphereModel& model, double elevation_deg, double wavelength_m) {
    require(elevation_deg > 0.0 && elevation_deg <= 90.0, ErrorKind::domain,
            "degenerate elevation: atmospheric path needs elevation in (0, 90]");
    const double tz = model.zenith_transmittance(wavelength_m);
    if (elevation_deg == 90.0) return tz;
    return std::pow(tz, 1.0 / std::sin(elevation_deg * constants::deg_to_rad));
}

/// Far-field geometric loss 2 (D / (theta Z))^2, capped at 1 in the near field.
inline double geometric_loss_approx(double aperture_diameter_m, double divergence_rad, double range_m) {
    require(aperture_diameter_m >= 0.0 && divergence_rad > 0.0 && range_m > 0.0, ErrorKind::domain,
            "geometric loss needs D >= 0, theta > 0, Z > 0");
    const double ratio = aperture_diameter_m / (divergence_rad * range_m);
    return std::min(1.0, 2.0 * ratio * ratio);
}

struct LinkConfig {
    OpticalChain chain;
    BeamParams beam;
    std::optional<TurbulenceModel> turbulence;
    PointingModel pointing;
    AtmosphereModel atmosphere;
    double aperture_diameter_m = 1.0;
    GeometryModel geometry = GeometryModel::gaussian;

    bool operator==(const LinkConfig&) const = default;
};

/// Per-term channel budget at slant range `range_km` and elevation
/// `elevation_deg`. The turbulence term is the extra collection loss caused by
/// broadening relative to the vacuum spot.
inline LinkBudget link_loss(const LinkConfig& cfg, double range_km, double elevation_deg) {
    cfg.chain.validate();
    cfg.beam.validate();
    cfg.atmosphere.validate();
    require(range_km > 0.0, ErrorKind::domain, "range must be positive");
    require(cfg.aperture_diameter_m > 0.0, ErrorKind::domain, "aperture must be positive");

    const double z = range_km * 1e3;
    const double radius = 0.5 * cfg.aperture_diameter_m;
    const double spot = beam_radius_at(cfg.beam, z);
    const double spot_at = beam_radius_at(cfg.beam, z, cfg.turbulence);

    LinkBudget b;
    b.transmitter = cfg.chain.transmitter;
    b.receiver = cfg.chain.receiver * cfg.chain.coupling * cfg.chain.detector;
    if (cfg.geometry == GeometryModel::gaussian) {
        b.diffraction = aperture_collection(spot, radius);
        b.turbulence = aperture_collection(spot_at, radius) / b.diffraction;
    } else {
        const double theta = cfg.beam.divergence_rad();
        b.diffraction = geometric_loss_approx(cfg.aperture_diameter_m, theta, z);
        b.turbulence = geometric_loss_approx(cfg.aperture_diameter_m, theta * spot_at / spot, z) / b.diffraction;
    }
    b.pointing = pointing_efficiency(spot_at, cfg.pointing, z) * cfg.chain.mispointing;
    b.atmosphere = atmospheric_transmittance(cfg.atmosphere, elevation_deg, cfg.beam.wavelength_m);
    return b;
}

/// Nominal 1000 km downlink: 15 urad divergence into a 1.2 m ground telescope,
/// far-field geometry, 850 nm, clear-night atmosphere.
inline LinkConfig reference_downlink_config(double transmitter_efficiency = 1.0) {
    LinkConfig cfg;
    cfg.chain = OpticalChain{transmitter_efficiency, 0.4, 0.5, 0.5, 0.5};
    cfg.beam = BeamParams::from_divergence(850e-9, 15e-6);
    cfg.aperture_diameter_m = 1.2;
    cfg.geometry = GeometryModel::far_field_approx;
    return cfg;
}

/// Nominal 1000 km uplink: turbulence widens the divergence to 20 urad and the
/// receiver is a 0.3 m satellite telescope.
inline LinkConfig reference_uplink_config() {
    LinkConfig cfg;
    cfg.chain = OpticalChain{0.5, 0.4, 0.5, 0.5, 0.5};
    cfg.beam = BeamParams::from_divergence(850e-9, 20e-6);
    cfg.aperture_diameter_m = 0.3;
    cfg.geometry = GeometryModel::far_field_approx;
    return cfg;
}

struct ReferenceBudgets {
    LinkBudget one_downlink;
    LinkBudget two_downlink;
    LinkBudget one_uplink;
};

/// Budgets of the three basic channel types at 1000 km, zenith.
inline ReferenceBudgets reference_budgets() {
    const double z = 1000.0;
    const auto down = link_loss(reference_downlink_config(), z, 90.0);
    // The entangled source splits its transmitter budget between two telescopes.
    const auto half = link_loss(reference_downlink_config(0.5), z, 90.0);
    return {down, LinkBudget::combine(half, half), link_loss(reference_uplink_config(), z, 90.0)};
}

struct FiberComparison {
    double fiber_db = 0.0;
    double freespace_db = 0.0;
    double crossover_km = 0.0;
};

/// Fiber loss (alpha * L) against a free-space link evaluated at zenith over
/// the same distance; the crossover is where the two loss curves meet.
inline FiberComparison fiber_vs_freespace(double fiber_db_per_km, const LinkConfig& freespace, double length_km) {
    require(fiber_db_per_km > 0.0, ErrorKind::domain, "fiber attenuation must be positive");
    require(length_km > 0.0, ErrorKind::domain, "length must be positive");
    auto freespace_loss = [&](double l) { return -link_loss(freespace, l, 90.0).total_db(); };
    auto gap = [&](double l) { return fiber_db_per_km * l - freespace_loss(l); };

    FiberComparison out;
    out.fiber_db = fiber_db_per_km * length_km;
    out.freespace_db = freespace_loss(length_km);
    double lo = 1e-3;
    double hi = 1.0;
    while (gap(hi) < 0.0 && hi < 1e6) hi *= 2.0;
    out.crossover_km = gap(lo) >= 0.0 ? 0.0 : bisect(gap, lo, hi, 1e-9);
    return out;
}

/// Expected detections through `length_km` of fiber for a source emitting
/// `rate_hz` single photons into ideal detectors over `duration_s`.
inline double fiber_detections(double rate_hz, double fiber_db_per_km, double length_km, double duration_s) {
    return rate_hz * from_db(-fiber_db_per_km * length_km) * duration_s;
}

} // namespace skylink
