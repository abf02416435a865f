#pragma once

// Photon sources, single-photon detectors, timing and coincidence counting.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "constants.hpp"
#include "error.hpp"
#include "rng.hpp"

namespace skylink {

struct PhotonNumberStats {
    double mu = 0.0;

    double p(unsigned n) const {
        if (mu == 0.0) return n == 0 ? 1.0 : 0.0;
        return std::exp(-mu + n * std::log(mu) - std::lgamma(n + 1.0));
    }
    double p0() const { return std::exp(-mu); }
    double p1() const { return mu * std::exp(-mu); }
    double p_multi() const { return -std::expm1(-mu) - p1(); }
};

inline PhotonNumberStats poisson_photon_stats(double mu) {
    require(mu >= 0.0, ErrorKind::domain, "mean photon number must be non-negative");
    return {mu};
}

struct SyncModel {
    double pulse_rate_hz = 100e6;
    double jitter_s = 529e-12;
    double window_s = 2e-9;

    void validate() const {
        require(window_s > 0.0, ErrorKind::domain, "coincidence window must be positive");
        require(jitter_s >= 0.0, ErrorKind::domain, "timing jitter must be non-negative");
        require(pulse_rate_hz > 0.0, ErrorKind::domain, "pulse rate must be positive");
    }

    bool operator==(const SyncModel&) const = default;
};

/// Fraction of Gaussian-jittered signal landing inside +-w/2.
inline double window_efficiency(const SyncModel& sync) {
    sync.validate();
    if (sync.jitter_s == 0.0) return 1.0;
    return std::erf(sync.window_s / (2.0 * std::sqrt(2.0) * sync.jitter_s));
}

struct DetectorModel {
    double efficiency = 0.5;
    double dark_rate_cps = 100.0;
    double radiation_increment_cps_per_day = 219.0;
    double mitigated_increment_cps_per_day = 1.0;
    double dead_time_s = 50e-9;

    void validate() const {
        require(efficiency > 0.0 && efficiency <= 1.0, ErrorKind::domain, "detector efficiency outside (0, 1]");
        require(dark_rate_cps >= 0.0, ErrorKind::domain, "dark count rate must be non-negative");
        require(dead_time_s >= 0.0, ErrorKind::domain, "dead time must be non-negative");
    }

    bool operator==(const DetectorModel&) const = default;
};

/// Dark count rate after `days` in orbit, with or without annealing/cooling.
inline double dark_rate_after(const DetectorModel& det, double days, bool mitigated) {
    require(days >= 0.0, ErrorKind::domain, "days must be non-negative");
    const double step = mitigated ? det.mitigated_increment_cps_per_day : det.radiation_increment_cps_per_day;
    return det.dark_rate_cps + days * step;
}

/// Non-paralyzable dead-time correction R' = R / (1 + R tau).
inline double apply_dead_time(double rate_cps, double dead_time_s) {
    require(rate_cps >= 0.0 && dead_time_s >= 0.0, ErrorKind::domain, "rate and dead time must be non-negative");
    return rate_cps / (1.0 + rate_cps * dead_time_s);
}

struct SpdcSource {
    double pair_rate_hz = 5.9e6;
    double fidelity = 0.907;
    double wavelength_m = 810e-9;

    void validate() const {
        require(pair_rate_hz >= 0.0, ErrorKind::domain, "pair rate must be non-negative");
        require(fidelity >= 0.0 && fidelity <= 1.0, ErrorKind::domain, "source fidelity outside [0, 1]");
    }

    bool operator==(const SpdcSource&) const = default;
};

/// Weak coherent pulse source with signal, decoy and vacuum intensities.
struct WcpSource {
    double rep_rate_hz = 100e6;
    std::array<double, 3> intensities{0.8, 0.1, 0.0};
    std::array<double, 3> probabilities{0.5, 0.25, 0.25};
    double basis_bias = 0.5; // probability of the Z basis
    double wavelength_m = 850e-9;

    void validate() const {
        require(rep_rate_hz > 0.0, ErrorKind::domain, "repetition rate must be positive");
        require(intensities[0] > intensities[1] && intensities[1] > intensities[2] && intensities[2] == 0.0,
                ErrorKind::domain, "intensities must satisfy signal > decoy > vacuum = 0");
        double sum = 0.0;
        for (double p : probabilities) {
            require(p >= 0.0, ErrorKind::domain, "intensity probabilities must be non-negative");
            sum += p;
        }
        require(std::abs(sum - 1.0) < 1e-9, ErrorKind::domain, "intensity probabilities must sum to 1");
        require(basis_bias > 0.0 && basis_bias < 1.0, ErrorKind::domain, "basis bias outside (0, 1)");
    }

    double mean_photon_number() const {
        return std::inner_product(intensities.begin(), intensities.end(), probabilities.begin(), 0.0);
    }

    bool operator==(const WcpSource&) const = default;
};

/// Click probability for a pulse of mean `mu` through total efficiency `eta`
/// with independent noise-click probability `p_noise` per gate.
inline double click_probability(double mu, double eta, double p_noise) {
    return 1.0 - std::exp(-mu * eta) * (1.0 - p_noise);
}

struct CountRecord {
    double singles_a = 0.0;
    double singles_b = 0.0;
    double coincidences = 0.0;
    double accidentals = 0.0;
    double snr = 0.0;
};

/// Singles, true and accidental coincidence rates for pairs split over two
/// links with efficiencies `eta_a`, `eta_b` (optics only; detector efficiency
/// and dark counts come from `det_a`, `det_b`).
inline CountRecord coincidence_rates(const SpdcSource& src, double eta_a, double eta_b, const DetectorModel& det_a,
                                     const DetectorModel& det_b, const SyncModel& sync, double background_a_cps,
                                     double background_b_cps) {
    src.validate();
    det_a.validate();
    det_b.validate();
    require(eta_a > 0.0 && eta_a <= 1.0 && eta_b > 0.0 && eta_b <= 1.0, ErrorKind::domain,
            "link efficiencies outside (0, 1]");
    require(background_a_cps >= 0.0 && background_b_cps >= 0.0, ErrorKind::domain,
            "background rates must be non-negative");
    CountRecord r;
    if (src.pair_rate_hz == 0.0) return r;
    const double ea = eta_a * det_a.efficiency;
    const double eb = eta_b * det_b.efficiency;
    r.singles_a = src.pair_rate_hz * ea + background_a_cps + det_a.dark_rate_cps;
    r.singles_b = src.pair_rate_hz * eb + background_b_cps + det_b.dark_rate_cps;
    r.coincidences = src.pair_rate_hz * ea * eb * window_efficiency(sync);
    r.accidentals = r.singles_a * r.singles_b * sync.window_s;
    r.snr = r.accidentals > 0.0 ? r.coincidences / r.accidentals : 0.0;
    return r;
}

/// Background rate (per station, equal at both ends) at which the coincidence
/// SNR drops to `target_snr`. Zero if the signal alone is already that noisy.
inline double background_for_snr(const SpdcSource& src, double eta_a, double eta_b, const DetectorModel& det_a,
                                 const DetectorModel& det_b, const SyncModel& sync, double target_snr) {
    require(target_snr > 0.0, ErrorKind::domain, "target SNR must be positive");
    const auto clean = coincidence_rates(src, eta_a, eta_b, det_a, det_b, sync, 0.0, 0.0);
    // (A + b)(B + b) = C / (snr w)
    const double a = clean.singles_a;
    const double b = clean.singles_b;
    const double k = clean.coincidences / (target_snr * sync.window_s);
    const double root = 0.5 * (-(a + b) + std::sqrt((a - b) * (a - b) + 4.0 * k));
    return std::max(root, 0.0);
}

struct CoincidenceSample {
    std::uint64_t pairs = 0;
    std::uint64_t clicks_a = 0;
    std::uint64_t clicks_b = 0;
    std::uint64_t coincidences = 0;
};

/// Pair-by-pair Monte Carlo of the signal part of coincidence_rates: each
/// photon is detected independently and the pair counts only if its timing
/// difference falls inside the window.
inline CoincidenceSample sample_pairs(std::uint64_t n_pairs, double eta_a, double eta_b, const DetectorModel& det_a,
                                      const DetectorModel& det_b, const SyncModel& sync, Rng& rng) {
    sync.validate();
    const double pa = eta_a * det_a.efficiency;
    const double pb = eta_b * det_b.efficiency;
    std::normal_distribution<double> jitter(0.0, sync.jitter_s);
    CoincidenceSample out;
    out.pairs = n_pairs;
    for (std::uint64_t i = 0; i < n_pairs; ++i) {
        const bool a = rng.bernoulli(pa);
        const bool b = rng.bernoulli(pb);
        out.clicks_a += a;
        out.clicks_b += b;
        if (a && b) {
            const double dt = sync.jitter_s > 0.0 ? jitter(rng.engine()) : 0.0;
            if (std::abs(dt) <= 0.5 * sync.window_s) ++out.coincidences;
        }
    }
    return out;
}

} // namespace skylink
