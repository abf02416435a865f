#pragma once

// Event-formalism decoherence of an entangled pair with one photon crossing
// Earth's gravitational potential, and the count-ratio estimators used to test it.

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "constants.hpp"
#include "error.hpp"
#include "numeric.hpp"
#include "rng.hpp"

namespace skylink {

struct EarthModel {
    double radius_m = constants::earth_radius_m;
    /// GM / c^2.
    double mass_length_m = constants::earth_gm / (constants::speed_of_light * constants::speed_of_light);
};

enum class DeltaTFormulation { general, local_clock };

/// Time-of-arrival spread for a photon from the ground to altitude `h_m`
/// observed at altitude angle `theta_deg`.
inline double delta_t(const EarthModel& earth, double h_m, double theta_deg,
                      DeltaTFormulation formulation = DeltaTFormulation::local_clock) {
    require(theta_deg > 0.0 && theta_deg <= 90.0, ErrorKind::domain, "altitude angle must lie in (0, 90]");
    require(h_m >= 0.0, ErrorKind::domain, "altitude must be non-negative");
    if (h_m == 0.0) return 0.0;
    const double re = earth.radius_m;
    const double m = earth.mass_length_m;
    const double top = re + h_m;
    const double tz = theta_deg == 90.0 ? 0.0 : std::tan((90.0 - theta_deg) * constants::deg_to_rad);
    const double k = re * re * tz * tz;
    auto path = [&](double r) { return std::sqrt(1.0 + 2.0 * m / r + k / (r * r)); };
    double meters;
    if (formulation == DeltaTFormulation::general) {
        meters = adaptive_simpson([&](double r) { return m / r * path(r); }, re, top, 1e-10);
    } else {
        meters = adaptive_simpson([&](double r) { return (m / r - m / top) * path(r); }, re, top, 1e-10);
    }
    require(std::isfinite(meters), ErrorKind::quadrature, "delta_t integral did not converge");
    return meters / constants::speed_of_light;
}

inline double decorrelation_D(double delta_t_s, double coherence_time_s) {
    require(coherence_time_s > 0.0, ErrorKind::domain, "coherence time must be positive");
    const double r = delta_t_s / coherence_time_s;
    return std::exp(-0.5 * r * r);
}

struct EventFormalismParams {
    double coherence_time_s = 1e-12;
    double altitude_m = 500e3;
    DeltaTFormulation formulation = DeltaTFormulation::local_clock;
    EarthModel earth{};

    double D(double theta_deg) const {
        return decorrelation_D(delta_t(earth, altitude_m, theta_deg, formulation), coherence_time_s);
    }
};

/// Coherence time giving D = target_D at `reference_theta_deg`.
inline double calibrate_coherence_time(const EarthModel& earth, double h_m, double reference_theta_deg, double target_D,
                                       DeltaTFormulation formulation = DeltaTFormulation::local_clock) {
    require(target_D > 0.0 && target_D < 1.0, ErrorKind::domain, "target D must lie in (0, 1)");
    const double dt = delta_t(earth, h_m, reference_theta_deg, formulation);
    require(dt > 0.0, ErrorKind::domain, "zero delta_t cannot be calibrated");
    return dt / std::sqrt(-2.0 * std::log(target_D));
}

struct DecoherenceSweepRow {
    double theta_deg;
    double delta_t_s;
    double D;
};

inline std::vector<DecoherenceSweepRow> decoherence_sweep(const EventFormalismParams& p, double from_deg, double to_deg,
                                                          double step_deg) {
    require(step_deg > 0.0 && from_deg <= to_deg, ErrorKind::domain, "bad sweep range");
    std::vector<DecoherenceSweepRow> rows;
    const int n = static_cast<int>(std::floor((to_deg - from_deg) / step_deg + 1e-9));
    for (int i = 0; i <= n; ++i) {
        const double th = from_deg + i * step_deg;
        const double dt = delta_t(p.earth, p.altitude_m, th, p.formulation);
        rows.push_back({th, dt, decorrelation_D(dt, p.coherence_time_s)});
    }
    return rows;
}

/// Raw counts for one altitude-angle bin.
struct AngleBinCounts {
    double theta_deg = 0.0;
    double duration_s = 0.0;
    // Entangled train.
    double epr_coincidences = 0.0;
    double epr_satellite = 0.0; // S_EPR
    double eta_path2 = 0.0;
    // Coherent train.
    double coh_coincidences = 0.0;
    double coh_satellite = 0.0; // S_COH
    double coh_path3 = 0.0;     // S_3
    double pulse_period_s = 0.0;
};

struct Ratio {
    double value = 0.0;
    double error = 0.0;
};

struct DecoherenceEstimate {
    double theta_deg = 0.0;
    Ratio D_epr;
    Ratio D_coh;
};

/// D_EPR = C / (eta2 S_EPR), D_COH = C / (S_COH S_3 t_p / T). Poisson errors
/// on every count, added in quadrature.
inline DecoherenceEstimate decorrelation_estimators(const AngleBinCounts& c) {
    const double sqt_epr = c.eta_path2 * c.epr_satellite;
    require(sqt_epr > 0.0, ErrorKind::division_by_zero, "no expected entangled coincidences in bin");
    require(c.duration_s > 0.0, ErrorKind::division_by_zero, "empty collection time");
    const double sqt_coh = c.coh_satellite * c.coh_path3 * c.pulse_period_s / c.duration_s;
    require(sqt_coh > 0.0, ErrorKind::division_by_zero, "no expected coherent coincidences in bin");

    auto rel = [](double n) { return n > 0.0 ? 1.0 / n : 0.0; };
    DecoherenceEstimate e;
    e.theta_deg = c.theta_deg;
    e.D_epr.value = c.epr_coincidences / sqt_epr;
    // An empty numerator still carries one count of uncertainty.
    e.D_epr.error = c.epr_coincidences > 0.0
                        ? e.D_epr.value * std::sqrt(rel(c.epr_coincidences) + rel(c.epr_satellite))
                        : 1.0 / sqt_epr;
    e.D_coh.value = c.coh_coincidences / sqt_coh;
    e.D_coh.error = c.coh_coincidences > 0.0
                        ? e.D_coh.value * std::sqrt(rel(c.coh_coincidences) + rel(c.coh_satellite) + rel(c.coh_path3))
                        : 1.0 / sqt_coh;
    return e;
}

enum class PulseTrain { entangled, coherent };

/// Assigns an arrival time to the nearer of two interleaved trains, the
/// coherent one delayed by half a period from the entangled one.
inline PulseTrain classify_arrival(double t_s, double period_s, double entangled_offset_s) {
    require(period_s > 0.0, ErrorKind::domain, "pulse period must be positive");
    double phase = std::fmod(t_s - entangled_offset_s, period_s);
    if (phase < 0.0) phase += period_s;
    return (phase < 0.25 * period_s || phase >= 0.75 * period_s) ? PulseTrain::entangled : PulseTrain::coherent;
}

struct DecoherenceExperiment {
    double altitude_m = 500e3;
    std::vector<double> angles_deg{42.0, 46.0, 50.0, 54.0, 58.0};
    double bin_duration_s = 60.0;
    double pair_rate_hz = 5.9e6;
    double uplink_loss_db = 50.0;
    double eta_path2 = 0.5;
    double pulse_period_s = 12e-9;
    double coherent_mu = 0.5;       // photons per coherent pulse before the uplink
    double path3_probability = 0.02; // per-pulse detection in path 3
};

/// Seeded count simulation. `injected_D(theta)` thins the entangled
/// coincidences; the coherent train is never affected.
inline std::vector<AngleBinCounts> simulate_decoherence_counts(const DecoherenceExperiment& x,
                                                               const std::function<double(double)>& injected_D,
                                                               std::uint64_t seed) {
    require(x.bin_duration_s > 0.0 && x.pulse_period_s > 0.0, ErrorKind::domain, "bad experiment timing");
    const double eta_link = std::pow(10.0, -x.uplink_loss_db / 10.0);
    const auto pulses = static_cast<std::uint64_t>(std::llround(x.bin_duration_s / x.pulse_period_s));
    const double p_sat = 1.0 - std::exp(-x.coherent_mu * eta_link);
    std::vector<AngleBinCounts> out;
    for (std::size_t i = 0; i < x.angles_deg.size(); ++i) {
        Rng rng(derive_seed(seed, i));
        AngleBinCounts c;
        c.theta_deg = x.angles_deg[i];
        c.duration_s = x.bin_duration_s;
        c.eta_path2 = x.eta_path2;
        c.pulse_period_s = x.pulse_period_s;
        const double D = injected_D(c.theta_deg);
        require(D >= 0.0 && D <= 1.0, ErrorKind::domain, "injected D outside [0, 1]");
        const std::uint64_t s_epr = rng.poisson(x.pair_rate_hz * eta_link * x.bin_duration_s);
        c.epr_satellite = static_cast<double>(s_epr);
        c.epr_coincidences = static_cast<double>(rng.binomial(s_epr, x.eta_path2 * D));
        const std::uint64_t s_coh = rng.binomial(pulses, p_sat);
        const std::uint64_t both = rng.binomial(s_coh, x.path3_probability);
        c.coh_satellite = static_cast<double>(s_coh);
        c.coh_coincidences = static_cast<double>(both);
        c.coh_path3 = static_cast<double>(both + rng.binomial(pulses - s_coh, x.path3_probability));
        out.push_back(c);
    }
    return out;
}

} // namespace skylink
