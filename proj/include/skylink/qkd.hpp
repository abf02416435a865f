#pragma once

// Prepare-and-measure (decoy BB84) and entanglement-based (BBM92) key
// distribution: transcripts, sifting, decoy-state bounds and key length.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <thread>
#include <vector>

#include "bits.hpp"
#include "error.hpp"
#include "link_budget.hpp"
#include "numeric.hpp"
#include "photonics.hpp"
#include "rng.hpp"

namespace skylink {

enum class Basis : std::uint8_t { Z = 0, X = 1 };

/// Z: H -> 0, V -> 1. X: -45 -> 0, +45 -> 1.
struct BasisBit {
    Basis basis = Basis::Z;
    std::uint8_t bit = 0;
    bool operator==(const BasisBit&) const = default;
};

inline double polarization_deg(BasisBit b) {
    if (b.basis == Basis::Z) return b.bit ? 90.0 : 0.0;
    return b.bit ? 45.0 : -45.0;
}

inline BasisBit from_polarization(double deg) {
    if (deg == 0.0) return {Basis::Z, 0};
    if (deg == 90.0) return {Basis::Z, 1};
    if (deg == -45.0) return {Basis::X, 0};
    if (deg == 45.0) return {Basis::X, 1};
    throw Error(ErrorKind::domain, "polarization is not one of 0, 90, -45, 45 degrees");
}

struct PulseRecord {
    std::uint8_t intensity = 0; // index into the source intensities
    Basis alice_basis = Basis::Z;
    std::uint8_t alice_bit = 0;
    bool detected = false;
    Basis bob_basis = Basis::Z;
    std::uint8_t bob_bit = 0;
};

struct Bb84Options {
    double misalignment = 0.01;     // intrinsic error on a signal click
    double background_cps = 0.0;    // added to the detector dark rate
    double intercept_fraction = 0.0; // intercept-resend eavesdropper
    unsigned workers = 1;
};

struct Transcript {
    WcpSource source;
    std::vector<PulseRecord> pulses;

    double duration_s() const { return static_cast<double>(pulses.size()) / source.rep_rate_hz; }
};

namespace detail {

struct ClickModel {
    double p_click = 0.0;
    double p_error = 0.0; // among clicks with matched bases
};

/// Click probability and matched-basis error probability for a pulse of mean
/// `mu`; simultaneous signal and noise clicks are assigned a random bit.
inline ClickModel click_model(double mu, double eta, double p_noise, double misalignment) {
    const double signal = -std::expm1(-mu * eta);
    ClickModel m;
    m.p_click = 1.0 - (1.0 - signal) * (1.0 - p_noise);
    if (m.p_click > 0.0) m.p_error = (misalignment * signal * (1.0 - p_noise) + 0.5 * p_noise) / m.p_click;
    return m;
}

inline double noise_probability(const DetectorModel& det, const SyncModel& sync, double background_cps) {
    return std::min(1.0, (det.dark_rate_cps + background_cps) * sync.window_s);
}

constexpr std::uint64_t pulse_shard = 1u << 20;

} // namespace detail

/// Pulse-by-pulse decoy BB84 over a channel of efficiency `link.total()`.
/// Shards of 2^20 pulses draw from derive_seed(seed, shard), so the transcript
/// is independent of the worker count.
inline Transcript bb84_round(const WcpSource& source, const LinkBudget& link, const DetectorModel& det,
                             const SyncModel& sync, std::uint64_t n_pulses, std::uint64_t seed,
                             const Bb84Options& options = {}) {
    source.validate();
    det.validate();
    require(n_pulses >= 1, ErrorKind::domain, "need at least one pulse");
    const double eta = link.total() * det.efficiency * window_efficiency(sync);
    const double p_noise = detail::noise_probability(det, sync, options.background_cps);

    std::array<double, 3> p_signal{};
    for (std::size_t i = 0; i < 3; ++i) p_signal[i] = -std::expm1(-source.intensities[i] * eta);
    const double c0 = source.probabilities[0];
    const double c1 = c0 + source.probabilities[1];

    Transcript t;
    t.source = source;
    t.pulses.resize(n_pulses);
    const std::uint64_t shards = (n_pulses + detail::pulse_shard - 1) / detail::pulse_shard;

    auto run_shard = [&](std::uint64_t k) {
        Rng rng(derive_seed(seed, k));
        const std::uint64_t begin = k * detail::pulse_shard;
        const std::uint64_t end = std::min(n_pulses, begin + detail::pulse_shard);
        for (std::uint64_t n = begin; n < end; ++n) {
            PulseRecord& r = t.pulses[n];
            const double u = rng.uniform();
            r.intensity = u < c0 ? 0 : (u < c1 ? 1 : 2);
            r.alice_basis = rng.bernoulli(source.basis_bias) ? Basis::Z : Basis::X;
            r.alice_bit = rng.coin();
            r.bob_basis = rng.bernoulli(source.basis_bias) ? Basis::Z : Basis::X;
            const bool signal = rng.bernoulli(p_signal[r.intensity]);
            const bool noise = p_noise > 0.0 && rng.bernoulli(p_noise);
            r.detected = signal || noise;
            if (!r.detected) continue;
            bool faithful = signal && !noise && r.bob_basis == r.alice_basis;
            if (faithful && options.intercept_fraction > 0.0 && rng.bernoulli(options.intercept_fraction)) {
                // Eve measured in the wrong basis half the time and resent a random state.
                faithful = rng.coin();
            }
            if (faithful) {
                r.bob_bit = r.alice_bit ^ static_cast<std::uint8_t>(rng.bernoulli(options.misalignment));
            } else {
                r.bob_bit = rng.coin();
            }
        }
    };

    const unsigned workers = std::max(1u, std::min<unsigned>(options.workers, static_cast<unsigned>(shards)));
    if (workers == 1) {
        for (std::uint64_t k = 0; k < shards; ++k) run_shard(k);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::uint64_t k = w; k < shards; k += workers) run_shard(k);
            });
        }
        for (auto& th : pool) th.join();
    }
    return t;
}

struct IntensityCounts {
    double sent = 0.0;
    double detected = 0.0;
    double sifted = 0.0;
    double errors = 0.0;
};

struct DecoyStats {
    std::array<double, 3> intensities{0.8, 0.1, 0.0};
    std::array<IntensityCounts, 3> counts{};

    double gain(std::size_t i) const { return counts[i].sent > 0.0 ? counts[i].detected / counts[i].sent : 0.0; }
    double qber(std::size_t i) const { return counts[i].sifted > 0.0 ? counts[i].errors / counts[i].sifted : 0.0; }

    double sifted() const { return counts[0].sifted + counts[1].sifted + counts[2].sifted; }
    double errors() const { return counts[0].errors + counts[1].errors + counts[2].errors; }
    double qber() const { return sifted() > 0.0 ? errors() / sifted() : 0.0; }

    DecoyStats& operator+=(const DecoyStats& o) {
        for (std::size_t i = 0; i < 3; ++i) {
            counts[i].sent += o.counts[i].sent;
            counts[i].detected += o.counts[i].detected;
            counts[i].sifted += o.counts[i].sifted;
            counts[i].errors += o.counts[i].errors;
        }
        return *this;
    }
};

struct SiftResult {
    std::uint64_t sifted_bits = 0;
    std::uint64_t errors = 0;
    double qber = 0.0;
    DecoyStats stats;
    Bits alice_key; // matched-basis bits of signal pulses
    Bits bob_key;
};

inline SiftResult sift_and_qber(const Transcript& t) {
    require(!t.pulses.empty(), ErrorKind::empty_sift, "transcript is empty");
    SiftResult out;
    out.stats.intensities = t.source.intensities;
    for (const auto& p : t.pulses) {
        auto& c = out.stats.counts[p.intensity];
        c.sent += 1.0;
        if (!p.detected) continue;
        c.detected += 1.0;
        if (p.bob_basis != p.alice_basis) continue;
        c.sifted += 1.0;
        const bool err = p.bob_bit != p.alice_bit;
        c.errors += err;
        ++out.sifted_bits;
        out.errors += err;
        if (p.intensity == 0) {
            out.alice_key.push_back(p.alice_bit);
            out.bob_key.push_back(p.bob_bit);
        }
    }
    require(out.sifted_bits > 0, ErrorKind::empty_sift, "no matched-basis detections");
    out.qber = static_cast<double>(out.errors) / static_cast<double>(out.sifted_bits);
    return out;
}

/// Expected per-intensity counts for `n_pulses` pulses (no sampling noise).
inline DecoyStats expected_decoy_stats(const WcpSource& source, double eta, double p_noise, double misalignment,
                                       double n_pulses) {
    source.validate();
    const double match = source.basis_bias * source.basis_bias + (1 - source.basis_bias) * (1 - source.basis_bias);
    DecoyStats s;
    s.intensities = source.intensities;
    for (std::size_t i = 0; i < 3; ++i) {
        const auto m = detail::click_model(source.intensities[i], eta, p_noise, misalignment);
        auto& c = s.counts[i];
        c.sent = n_pulses * source.probabilities[i];
        c.detected = c.sent * m.p_click;
        c.sifted = c.detected * match;
        c.errors = c.sifted * m.p_error;
    }
    return s;
}

/// Aggregate sampling of the same counts: binomial draws per stage.
inline DecoyStats sample_decoy_stats(const WcpSource& source, double eta, double p_noise, double misalignment,
                                     std::uint64_t n_pulses, Rng& rng) {
    source.validate();
    const double match = source.basis_bias * source.basis_bias + (1 - source.basis_bias) * (1 - source.basis_bias);
    DecoyStats s;
    s.intensities = source.intensities;
    std::uint64_t remaining = n_pulses;
    double p_left = 1.0;
    for (std::size_t i = 0; i < 3; ++i) {
        const std::uint64_t sent =
            i == 2 ? remaining : rng.binomial(remaining, std::min(1.0, source.probabilities[i] / p_left));
        remaining -= sent;
        p_left -= source.probabilities[i];
        const auto m = detail::click_model(source.intensities[i], eta, p_noise, misalignment);
        const std::uint64_t detected = rng.binomial(sent, m.p_click);
        const std::uint64_t sifted = rng.binomial(detected, match);
        const std::uint64_t errors = rng.binomial(sifted, m.p_error);
        s.counts[i] = {double(sent), double(detected), double(sifted), double(errors)};
    }
    return s;
}

struct DecoyBounds {
    double y0 = 0.0;
    double y1_lower = 0.0;
    double e1_upper = 0.0;
};

namespace detail {

/// Hoeffding deviation for an observed count x at failure probability eps.
inline double count_deviation(double x, double eps) { return std::sqrt(0.5 * x * std::log(1.0 / eps)); }

} // namespace detail

/// Vacuum + weak-decoy analytic bounds on the single-photon yield and error
/// rate. With `epsilon`, observed counts are first moved to the pessimistic
/// edge of their Hoeffding intervals.
inline DecoyBounds decoy_bounds(const DecoyStats& stats, std::optional<double> epsilon = std::nullopt) {
    const auto& mu_ = stats.intensities;
    std::optional<std::size_t> vac;
    std::vector<std::size_t> lit;
    for (std::size_t i = 0; i < 3; ++i) {
        if (stats.counts[i].sent <= 0.0) continue;
        if (mu_[i] == 0.0) vac = i; else lit.push_back(i);
    }
    require(vac.has_value() && !lit.empty(), ErrorKind::domain,
            "decoy bounds need vacuum statistics and at least one non-vacuum intensity");
    std::sort(lit.begin(), lit.end(), [&](std::size_t a, std::size_t b) { return mu_[a] > mu_[b]; });

    auto adjusted = [&](double count, double sent, int direction) {
        double x = count;
        if (epsilon) x = std::max(0.0, x + direction * detail::count_deviation(count, *epsilon));
        return x / sent;
    };

    const auto& cv = stats.counts[*vac];
    DecoyBounds b;
    const double y0_upper = adjusted(cv.detected, cv.sent, +1);
    const double y0_lower = adjusted(cv.detected, cv.sent, -1);
    b.y0 = cv.detected / cv.sent;

    const std::size_t s = lit.front();
    const double mu = mu_[s];
    const double q_mu_upper = adjusted(stats.counts[s].detected, stats.counts[s].sent, +1);
    std::size_t weak = s;
    double nu = mu;
    if (lit.size() >= 2) {
        weak = lit.back();
        nu = mu_[weak];
        const double q_nu_lower = adjusted(stats.counts[weak].detected, stats.counts[weak].sent, -1);
        b.y1_lower = mu / (mu * nu - nu * nu) *
                     (q_nu_lower * std::exp(nu) - q_mu_upper * std::exp(mu) * nu * nu / (mu * mu) -
                      (mu * mu - nu * nu) / (mu * mu) * y0_upper);
    } else {
        const double q_mu_lower = adjusted(stats.counts[s].detected, stats.counts[s].sent, -1);
        b.y1_lower = (q_mu_lower * std::exp(mu) - y0_upper - (std::exp(mu) - 1.0 - mu)) / mu;
    }
    require(b.y1_lower > 0.0, ErrorKind::inconsistent_statistics,
            "single-photon yield lower bound is not positive");

    const auto& cw = stats.counts[weak];
    require(cw.sifted > 0.0, ErrorKind::inconsistent_statistics, "no sifted decoy bits for the error bound");
    // E_nu Q_nu over matched bases: scale the error count to all detections.
    const double err_fraction = adjusted(cw.errors, cw.sifted, +1);
    const double eq = err_fraction * (cw.detected / cw.sent);
    b.e1_upper = std::clamp((eq * std::exp(nu) - 0.5 * y0_lower) / (b.y1_lower * nu), 0.0, 0.5);
    return b;
}

enum class KeyMode { asymptotic, finite };

struct SecureKeyResult {
    double sifted_bits = 0.0;
    double qber = 0.0;
    double y1_lower = 0.0;
    double e1_upper = 0.0;
    double secure_bits_asymptotic = 0.0;
    double secure_bits_finite = 0.0;
    double failure_prob = 1e-9;
};

namespace detail {

inline double composable_penalty(double eps) { return 6.0 * std::log2(21.0 / eps) + std::log2(2.0 / eps); }

/// Key bits from `n_key` sifted bits of which `n1` are single-photon (or
/// entangled-pair) events with phase-error bound `e1`.
inline double key_bits(double n_key, double n1, double e1, double qber, double f_ec, double eps, KeyMode mode) {
    double e = e1;
    double penalty = 0.0;
    if (mode == KeyMode::finite) {
        if (n1 <= 0.0) return 0.0;
        e += std::sqrt(std::log(1.0 / eps) / (2.0 * n1));
        penalty = composable_penalty(eps);
    }
    e = std::min(e, 0.5);
    const double bits = n1 * (1.0 - binary_entropy(e)) - n_key * f_ec * binary_entropy(qber) - penalty;
    return std::max(0.0, std::floor(bits));
}

} // namespace detail

/// Key length from the signal-intensity sifted bits.
inline double secure_key_bits(const DecoyStats& stats, const DecoyBounds& bounds, double f_ec, double eps,
                              KeyMode mode) {
    require(f_ec >= 1.0, ErrorKind::domain, "error-correction efficiency must be at least 1");
    require(eps > 0.0 && eps < 1.0, ErrorKind::domain, "failure probability outside (0, 1)");
    std::size_t s = 0;
    for (std::size_t i = 1; i < 3; ++i) {
        if (stats.intensities[i] > stats.intensities[s]) s = i;
    }
    const auto& c = stats.counts[s];
    if (c.sifted <= 0.0 || c.detected <= 0.0) return 0.0;
    const double mu = stats.intensities[s];
    const double q_mu = c.detected / c.sent;
    const double omega1 = std::min(1.0, bounds.y1_lower * mu * std::exp(-mu) / q_mu);
    return detail::key_bits(c.sifted, omega1 * c.sifted, bounds.e1_upper, stats.qber(s), f_ec, eps, mode);
}

/// Both key lengths; the finite one uses Hoeffding-corrected decoy bounds.
/// Statistics too poor to bound the single-photon yield give zero key.
inline SecureKeyResult secure_key_length(const DecoyStats& stats, double f_ec = 1.16, double eps = 1e-9) {
    SecureKeyResult r;
    r.sifted_bits = stats.sifted();
    r.qber = stats.qber();
    r.failure_prob = eps;
    try {
        const auto asym = decoy_bounds(stats);
        r.y1_lower = asym.y1_lower;
        r.e1_upper = asym.e1_upper;
        r.secure_bits_asymptotic = secure_key_bits(stats, asym, f_ec, eps, KeyMode::asymptotic);
        r.secure_bits_finite = secure_key_bits(stats, decoy_bounds(stats, eps), f_ec, eps, KeyMode::finite);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::inconsistent_statistics) throw;
    }
    return r;
}

/// Entanglement-based key: every sifted bit counts, phase error = bit error.
inline SecureKeyResult bbm92_key_length(double sifted_bits, double qber, double f_ec = 1.1, double eps = 1e-9) {
    require(sifted_bits >= 0.0, ErrorKind::domain, "sifted bits must be non-negative");
    require(qber >= 0.0 && qber <= 0.5, ErrorKind::domain, "QBER outside [0, 0.5]");
    SecureKeyResult r;
    r.sifted_bits = sifted_bits;
    r.qber = qber;
    r.y1_lower = 1.0;
    r.e1_upper = qber;
    r.failure_prob = eps;
    r.secure_bits_asymptotic =
        std::max(0.0, sifted_bits * (1.0 - binary_entropy(qber) - f_ec * binary_entropy(qber)));
    r.secure_bits_finite = detail::key_bits(sifted_bits, sifted_bits, qber, qber, f_ec, eps, KeyMode::finite);
    return r;
}

struct PairRecord {
    Basis basis_a = Basis::Z;
    std::uint8_t bit_a = 0;
    Basis basis_b = Basis::Z;
    std::uint8_t bit_b = 0;
};

/// Detected pairs measured in independently random bases at both ends; bits
/// on matched bases disagree with probability `qber`.
inline std::vector<PairRecord> bbm92_round(std::uint64_t n_coincidences, double qber, std::uint64_t seed) {
    require(qber >= 0.0 && qber <= 0.5, ErrorKind::domain, "QBER outside [0, 0.5]");
    Rng rng(seed);
    std::vector<PairRecord> out(n_coincidences);
    for (auto& p : out) {
        p.basis_a = rng.coin() ? Basis::X : Basis::Z;
        p.basis_b = rng.coin() ? Basis::X : Basis::Z;
        p.bit_a = rng.coin();
        p.bit_b = p.basis_a == p.basis_b ? p.bit_a ^ static_cast<std::uint8_t>(rng.bernoulli(qber)) : rng.coin();
    }
    return out;
}

inline SiftResult sift_pairs(const std::vector<PairRecord>& pairs) {
    require(!pairs.empty(), ErrorKind::empty_sift, "no coincidences");
    SiftResult out;
    for (const auto& p : pairs) {
        if (p.basis_a != p.basis_b) continue;
        ++out.sifted_bits;
        out.errors += p.bit_a != p.bit_b;
        out.alice_key.push_back(p.bit_a);
        out.bob_key.push_back(p.bit_b);
    }
    require(out.sifted_bits > 0, ErrorKind::empty_sift, "no matched-basis coincidences");
    out.qber = static_cast<double>(out.errors) / static_cast<double>(out.sifted_bits);
    out.stats.intensities = {1.0, 0.0, 0.0};
    out.stats.counts[0] = {double(pairs.size()), double(pairs.size()), double(out.sifted_bits), double(out.errors)};
    return out;
}

} // namespace skylink
