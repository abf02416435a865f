#pragma once

// Single-qubit teleportation over a two-qubit channel, simulated on the full
// three-qubit density matrix.

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "two_qubit.hpp"

namespace skylink {

using Mat8 = Eigen::Matrix<cplx, 8, 8>;

enum class BsmMode {
    full,          // all four Bell outcomes
    linear_optics, // psi- and psi+ identified, phi+- inconclusive
    singlet_only,  // psi- only
};

inline bool bsm_identifies(BsmMode mode, BellState b) {
    switch (mode) {
    case BsmMode::full: return true;
    case BsmMode::linear_optics: return b == BellState::psi_minus || b == BellState::psi_plus;
    case BsmMode::singlet_only: return b == BellState::psi_minus;
    }
    return false;
}

inline Mat2 pure_density(const Vec2& psi) { return psi * psi.adjoint(); }

struct Correction {
    Mat2 unitary;
    std::string label;
};

/// Pauli correction for BSM outcome `outcome` when the channel nominally holds
/// `channel_target`: the inverse of 2 (<B_k| x I)(. x |B_c>).
inline Correction pauli_correction(BellState outcome, BellState channel_target) {
    const Vec4 bk = bell_vector(outcome);
    const Vec4 bc = bell_vector(channel_target);
    Mat2 m = Mat2::Zero();
    for (int j = 0; j < 2; ++j) {
        for (int i = 0; i < 2; ++i) {
            cplx acc = 0.0;
            for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b) {
                    // |j> on qubit 1; channel on qubits 2, 3.
                    if (a != j) continue;
                    acc += std::conj(bk(2 * a + b)) * bc(2 * b + i);
                }
            }
            m(i, j) = 2.0 * acc;
        }
    }
    Correction c;
    c.unitary = m.inverse();
    const std::array<std::pair<std::string, Mat2>, 4> paulis{
        {{"I", Mat2::Identity()}, {"X", pauli_x()}, {"Z", pauli_z()}, {"XZ", pauli_x() * pauli_z()}}};
    for (const auto& [name, p] : paulis) {
        if (std::abs(std::abs((p.adjoint() * c.unitary).trace()) - 2.0) < 1e-9) c.label = name;
    }
    return c;
}

struct BsmBranch {
    BellState outcome;
    double probability = 0.0;
    Mat2 bob_state; // after correction, normalized
};

/// All four BSM branches for input `rho_in` over channel `channel`.
inline std::array<BsmBranch, 4> teleport_branches(const Mat2& rho_in, const TwoQubitState& channel,
                                                  BellState channel_target = BellState::phi_plus) {
    Mat8 rho;
    for (int r = 0; r < 8; ++r) {
        for (int c = 0; c < 8; ++c) rho(r, c) = rho_in(r / 4, c / 4) * channel.rho(r % 4, c % 4);
    }
    std::array<BsmBranch, 4> out{};
    for (std::size_t k = 0; k < 4; ++k) {
        const BellState b = all_bell_states[k];
        const Vec4 v = bell_vector(b);
        // (<B_k| x I) rho (|B_k> x I) restricted to Bob's qubit.
        Mat2 bob = Mat2::Zero();
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) {
                cplx acc = 0.0;
                for (int x = 0; x < 4; ++x) {
                    for (int y = 0; y < 4; ++y) acc += std::conj(v(x)) * rho(2 * x + i, 2 * y + j) * v(y);
                }
                bob(i, j) = acc;
            }
        }
        const double p = bob.trace().real();
        out[k].outcome = b;
        out[k].probability = p;
        if (p > 0.0) {
            const Mat2 u = pauli_correction(b, channel_target).unitary;
            out[k].bob_state = u * (bob / p) * u.adjoint();
        } else {
            out[k].bob_state = Mat2::Identity() / 2.0;
        }
    }
    return out;
}

inline double state_fidelity(const Vec2& psi, const Mat2& rho) { return (psi.adjoint() * rho * psi)(0, 0).real(); }

struct TeleportOutcome {
    std::optional<BellState> bsm_result; // empty when the BSM was inconclusive
    std::string correction;
    Mat2 output = Mat2::Identity() / 2.0;
    double fidelity = 0.0;
};

/// One teleportation event with a sampled BSM outcome.
inline TeleportOutcome teleport(const Vec2& input, const TwoQubitState& channel, BsmMode mode, std::uint64_t seed,
                                BellState channel_target = BellState::phi_plus) {
    require(std::abs(input.norm() - 1.0) < 1e-9, ErrorKind::domain, "input state is not normalized");
    const auto branches = teleport_branches(pure_density(input), channel, channel_target);
    Rng rng(seed);
    double u = rng.uniform();
    std::size_t k = 0;
    for (; k < 3; ++k) {
        if (u < branches[k].probability) break;
        u -= branches[k].probability;
    }
    TeleportOutcome out;
    if (!bsm_identifies(mode, branches[k].outcome)) return out;
    out.bsm_result = branches[k].outcome;
    out.correction = pauli_correction(branches[k].outcome, channel_target).label;
    out.output = branches[k].bob_state;
    out.fidelity = state_fidelity(input, out.output);
    return out;
}

struct NamedState {
    std::string label;
    Vec2 psi;
};

/// H, V, D, A, R, L.
inline std::vector<NamedState> mutually_unbiased_inputs() {
    const double s = 1.0 / std::sqrt(2.0);
    const cplx i(0.0, 1.0);
    return {{"H", Vec2(1, 0)},      {"V", Vec2(0, 1)},      {"D", Vec2(s, s)},
            {"A", Vec2(s, -s)},     {"R", Vec2(s, s * i)}, {"L", Vec2(s, -s * i)}};
}

inline constexpr double classical_fidelity_limit = 2.0 / 3.0;

struct TeleportNoise {
    TwoQubitState channel = TwoQubitState::bell(BellState::phi_plus);
    double bsm_visibility = 1.0;     // imperfect two-photon interference, as depolarization
    double accidental_fraction = 0.0; // events with an uncorrelated output
    BsmMode mode = BsmMode::linear_optics;
};

struct StateFidelity {
    std::string label;
    double fidelity = 0.0;
    double stderr_ = 0.0;
    std::uint64_t events = 0;
};

struct TeleportFidelityReport {
    std::vector<StateFidelity> states;
    double mean_fidelity = 0.0;
    double mean_stderr = 0.0;
    double classical_limit = classical_fidelity_limit;
};

/// Expected fidelity per input over successful BSM events.
inline double expected_teleport_fidelity(const Vec2& psi, const TeleportNoise& noise) {
    const auto branches = teleport_branches(pure_density(psi), noise.channel);
    double p_ok = 0.0;
    double f = 0.0;
    for (const auto& b : branches) {
        if (!bsm_identifies(noise.mode, b.outcome)) continue;
        p_ok += b.probability;
        f += b.probability * state_fidelity(psi, b.bob_state);
    }
    f = p_ok > 0.0 ? f / p_ok : 0.5;
    f = noise.bsm_visibility * f + (1.0 - noise.bsm_visibility) * 0.5;
    return (1.0 - noise.accidental_fraction) * f + noise.accidental_fraction * 0.5;
}

/// Six-state benchmark: `n_events` successful events spread round-robin over
/// the inputs; each event projects Bob's output onto the input state.
inline TeleportFidelityReport teleport_fidelity_experiment(const TeleportNoise& noise, std::uint64_t n_events,
                                                           std::uint64_t seed) {
    require(n_events >= 1, ErrorKind::domain, "need at least one event");
    require(noise.accidental_fraction >= 0.0 && noise.accidental_fraction <= 1.0, ErrorKind::domain,
            "accidental fraction outside [0, 1]");
    require(noise.bsm_visibility >= 0.0 && noise.bsm_visibility <= 1.0, ErrorKind::domain,
            "BSM visibility outside [0, 1]");
    const auto inputs = mutually_unbiased_inputs();
    TeleportFidelityReport report;
    double var = 0.0;
    for (std::size_t s = 0; s < inputs.size(); ++s) {
        const std::uint64_t n = n_events / inputs.size() + (s < n_events % inputs.size() ? 1 : 0);
        const double f = expected_teleport_fidelity(inputs[s].psi, noise);
        Rng rng(derive_seed(seed, s));
        const std::uint64_t ok = rng.binomial(n, f);
        StateFidelity sf;
        sf.label = inputs[s].label;
        sf.events = n;
        if (n > 0) {
            sf.fidelity = static_cast<double>(ok) / static_cast<double>(n);
            sf.stderr_ = std::sqrt(std::max(sf.fidelity * (1.0 - sf.fidelity), 1.0 / n) / static_cast<double>(n));
        }
        report.mean_fidelity += sf.fidelity / inputs.size();
        var += sf.stderr_ * sf.stderr_;
        report.states.push_back(sf);
    }
    report.mean_stderr = std::sqrt(var) / inputs.size();
    return report;
}

} // namespace skylink
