#include <gtest/gtest.h>

#include <cmath>

#include "skylink/teleport.hpp"

using namespace skylink;

namespace {
constexpr double deg = constants::pi / 180.0;
}

TEST(TwoQubit, BellStatesAreValidAndOrthonormal) {
    for (BellState a : all_bell_states) {
        EXPECT_TRUE(TwoQubitState::bell(a).is_valid());
        for (BellState b : all_bell_states) {
            EXPECT_NEAR(TwoQubitState::bell(a).fidelity(b), a == b ? 1.0 : 0.0, 1e-12);
        }
    }
    EXPECT_TRUE(TwoQubitState::maximally_mixed().is_valid());
    EXPECT_TRUE(TwoQubitState::werner(-1.0 / 3.0).is_valid());
    EXPECT_THROW(TwoQubitState::werner(1.2), Error);

    TwoQubitState bad;
    bad.rho(0, 0) = 1.5;
    bad.rho(3, 3) = -0.75;
    EXPECT_FALSE(bad.is_valid());
}

TEST(TwoQubit, CorrelationFunction) {
    const auto phi = TwoQubitState::bell(BellState::phi_plus);
    EXPECT_NEAR(correlation_E(phi, 0.0, 0.0), 1.0, 1e-12);
    EXPECT_NEAR(correlation_E(phi, 0.0, 45.0 * deg), 0.0, 1e-12);
    const auto w = TwoQubitState::werner(0.825);
    EXPECT_NEAR(correlation_E(w, 0.0, 22.5 * deg), 0.5833630944789017, 1e-12);
    for (double a : {0.0, 10.0, 33.0, 71.0}) {
        for (double b : {0.0, 5.0, 47.0}) {
            EXPECT_NEAR(correlation_E(w, a * deg, b * deg), 0.825 * std::cos(2.0 * (a - b) * deg), 1e-12);
        }
    }
}

TEST(Chsh, TsirelsonAndWerner) {
    EXPECT_NEAR(chsh_analytic(TwoQubitState::bell(BellState::phi_plus)).S, 2.0 * std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(chsh_analytic(TwoQubitState::maximally_mixed()).S, 0.0, 1e-12);
    // F = 0.869 -> p = 0.825333.
    const auto s = chsh_analytic(TwoQubitState::from_fidelity(0.869));
    EXPECT_NEAR(s.S, 2.3343944, 1e-6);
    EXPECT_GT(s.S, 2.0);
    EXPECT_DOUBLE_EQ(local_deterministic_max_S(), 2.0);
}

TEST(Chsh, SampledAgreesAndWorkerInvariant) {
    const auto st = TwoQubitState::werner(0.825);
    const auto a = chsh_sampled(st, ChshSettings{}, 400'000, 17, 1);
    const auto b = chsh_sampled(st, ChshSettings{}, 400'000, 17, 4);
    EXPECT_EQ(a.S, b.S);
    EXPECT_NEAR(a.S, 2.0 * std::sqrt(2.0) * 0.825, 4.0 * a.standard_error);

    const auto small = chsh_sampled(st, ChshSettings{}, 1167, 5);
    EXPECT_NEAR(small.standard_error, 0.095, 0.01);
    EXPECT_EQ(small.trials[0] + small.trials[1] + small.trials[2] + small.trials[3], 1167u);
}

TEST(Chsh, SampledStatisticalCoverage) {
    const auto st = TwoQubitState::werner(0.825);
    const double truth = 2.0 * std::sqrt(2.0) * 0.825;
    int inside = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto r = chsh_sampled(st, ChshSettings{}, 4000, seed);
        inside += std::abs(r.S - truth) <= 3.0 * r.standard_error;
    }
    EXPECT_GE(inside, 194);
}

TEST(Fidelity, FromVisibilities) {
    EXPECT_NEAR(fidelity_from_visibilities(0.825, 0.825), 0.86875, 1e-12);
    EXPECT_NEAR(fidelity_from_visibilities(0.0, 0.0), 0.25, 1e-12);
    EXPECT_NEAR(fidelity_from_visibilities(1.0, 1.0), 1.0, 1e-12);
    EXPECT_NEAR(fidelity_from_visibilities(0.9, 0.8, FidelityEstimator::two_visibility_bound), 0.85, 1e-12);
    // Werner states satisfy the estimator exactly.
    for (double p : {0.2, 0.6, 0.9}) {
        const auto w = TwoQubitState::werner(p);
        const double vzz = correlation_E(w, 0.0, 0.0);
        const double vxx = correlation_E(w, 45.0 * deg, 45.0 * deg);
        EXPECT_NEAR(fidelity_from_visibilities(vzz, vxx), w.fidelity(BellState::phi_plus), 1e-12);
    }
    EXPECT_THROW(fidelity_from_visibilities(1.1, 0.0), Error);
}

TEST(Teleport, PerfectChannelAllOutcomes) {
    const auto bell = TwoQubitState::bell(BellState::phi_plus);
    for (const auto& in : mutually_unbiased_inputs()) {
        const auto branches = teleport_branches(pure_density(in.psi), bell);
        double total = 0.0;
        for (const auto& br : branches) {
            EXPECT_NEAR(br.probability, 0.25, 1e-12);
            EXPECT_NEAR(state_fidelity(in.psi, br.bob_state), 1.0, 1e-12) << in.label;
            total += br.probability;
        }
        EXPECT_NEAR(total, 1.0, 1e-12);
    }
}

TEST(Teleport, CorrectionsArePaulis) {
    EXPECT_EQ(pauli_correction(BellState::phi_plus, BellState::phi_plus).label, "I");
    EXPECT_EQ(pauli_correction(BellState::phi_minus, BellState::phi_plus).label, "Z");
    EXPECT_EQ(pauli_correction(BellState::psi_plus, BellState::phi_plus).label, "X");
    EXPECT_EQ(pauli_correction(BellState::psi_minus, BellState::phi_plus).label, "XZ");
    // Another channel target still yields a Pauli.
    for (BellState k : all_bell_states) EXPECT_FALSE(pauli_correction(k, BellState::psi_minus).label.empty());
}

TEST(Teleport, BsmModesSuccessFraction) {
    const auto bell = TwoQubitState::bell(BellState::phi_plus);
    const Vec2 in = mutually_unbiased_inputs()[2].psi;
    int lin = 0, singlet = 0, full = 0;
    const int n = 4000;
    for (int s = 0; s < n; ++s) {
        const auto a = teleport(in, bell, BsmMode::linear_optics, static_cast<std::uint64_t>(s));
        const auto b = teleport(in, bell, BsmMode::singlet_only, static_cast<std::uint64_t>(s));
        const auto c = teleport(in, bell, BsmMode::full, static_cast<std::uint64_t>(s));
        lin += a.bsm_result.has_value();
        singlet += b.bsm_result.has_value();
        full += c.bsm_result.has_value();
        if (a.bsm_result) EXPECT_NEAR(a.fidelity, 1.0, 1e-12);
    }
    EXPECT_EQ(full, n);
    EXPECT_NEAR(lin / double(n), 0.5, 0.03);
    EXPECT_NEAR(singlet / double(n), 0.25, 0.03);
}

TEST(Teleport, WernerChannelGivesHalfOnePlusP) {
    for (double p : {0.0, 0.4, 0.8}) {
        TeleportNoise noise;
        noise.channel = TwoQubitState::werner(p);
        noise.mode = BsmMode::full;
        for (const auto& in : mutually_unbiased_inputs()) {
            EXPECT_NEAR(expected_teleport_fidelity(in.psi, noise), (1.0 + p) / 2.0, 1e-12);
        }
        noise.mode = BsmMode::linear_optics;
        for (const auto& in : mutually_unbiased_inputs()) {
            EXPECT_NEAR(expected_teleport_fidelity(in.psi, noise), (1.0 + p) / 2.0, 1e-12);
        }
    }
}

TEST(Teleport, FidelityExperimentBeatsClassical) {
    TeleportNoise noise;
    noise.channel = TwoQubitState::werner(0.7);
    const auto r = teleport_fidelity_experiment(noise, 60'000, 9);
    ASSERT_EQ(r.states.size(), 6u);
    EXPECT_NEAR(r.mean_fidelity, 0.85, 4.0 * r.mean_stderr);
    EXPECT_GT(r.mean_fidelity, r.classical_limit);
    for (const auto& s : r.states) EXPECT_EQ(s.events, 10'000u);

    noise.accidental_fraction = 1.0;
    const auto floor = teleport_fidelity_experiment(noise, 60'000, 9);
    EXPECT_NEAR(floor.mean_fidelity, 0.5, 4.0 * floor.mean_stderr);
}
