#pragma once

// Two-qubit polarization states, analyzers and CHSH tests.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string_view>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "constants.hpp"
#include "error.hpp"
#include "rng.hpp"

namespace skylink {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;
using Vec2 = Eigen::Vector2cd;
using Vec4 = Eigen::Vector4cd;

enum class BellState { phi_plus, phi_minus, psi_plus, psi_minus };

inline constexpr std::array<BellState, 4> all_bell_states{BellState::phi_plus, BellState::phi_minus,
                                                          BellState::psi_plus, BellState::psi_minus};

inline std::string_view to_string(BellState b) {
    switch (b) {
    case BellState::phi_plus: return "phi+";
    case BellState::phi_minus: return "phi-";
    case BellState::psi_plus: return "psi+";
    case BellState::psi_minus: return "psi-";
    }
    return "?";
}

/// Basis order HH, HV, VH, VV (H = 0, V = 1).
inline Vec4 bell_vector(BellState b) {
    const double s = 1.0 / std::sqrt(2.0);
    switch (b) {
    case BellState::phi_plus: return Vec4(s, 0, 0, s);
    case BellState::phi_minus: return Vec4(s, 0, 0, -s);
    case BellState::psi_plus: return Vec4(0, s, s, 0);
    case BellState::psi_minus: return Vec4(0, s, -s, 0);
    }
    return Vec4::Zero();
}

struct TwoQubitState {
    Mat4 rho = Mat4::Identity() / 4.0;

    static TwoQubitState bell(BellState b) {
        const Vec4 v = bell_vector(b);
        return {v * v.adjoint()};
    }

    /// p |B><B| + (1 - p) I / 4.
    static TwoQubitState werner(double p, BellState b = BellState::phi_plus) {
        require(p >= -1.0 / 3.0 && p <= 1.0, ErrorKind::domain, "Werner parameter outside [-1/3, 1]");
        return {p * bell(b).rho + (1.0 - p) * Mat4::Identity() / 4.0};
    }

    /// Werner state with fidelity F to the Bell state: p = (4F - 1) / 3.
    static TwoQubitState from_fidelity(double fidelity, BellState b = BellState::phi_plus) {
        require(fidelity >= 0.0 && fidelity <= 1.0, ErrorKind::domain, "fidelity outside [0, 1]");
        return werner((4.0 * fidelity - 1.0) / 3.0, b);
    }

    static TwoQubitState maximally_mixed() { return {}; }

    double fidelity(BellState b) const {
        const Vec4 v = bell_vector(b);
        return (v.adjoint() * rho * v)(0, 0).real();
    }

    bool is_valid(double tol = 1e-10) const {
        if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > tol) return false;
        if (std::abs(rho.trace() - cplx(1.0, 0.0)) > tol) return false;
        Eigen::SelfAdjointEigenSolver<Mat4> es(rho);
        return es.eigenvalues().minCoeff() >= -tol;
    }
};

inline Mat2 pauli_x() { return (Mat2() << 0, 1, 1, 0).finished(); }
inline Mat2 pauli_y() { return (Mat2() << 0, cplx(0, -1), cplx(0, 1), 0).finished(); }
inline Mat2 pauli_z() { return (Mat2() << 1, 0, 0, -1).finished(); }

template <typename A, typename B>
Eigen::MatrixXcd kron(const A& a, const B& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
    return out;
}

/// Polarizer observable at angle `a` (radians): cos 2a Z + sin 2a X.
inline Mat2 analyzer(double a) { return std::cos(2.0 * a) * pauli_z() + std::sin(2.0 * a) * pauli_x(); }

/// Projector onto outcome +1 (`plus`) or -1 of analyzer(a).
inline Mat2 analyzer_projector(double a, bool plus) {
    return 0.5 * (Mat2::Identity() + (plus ? 1.0 : -1.0) * analyzer(a));
}

inline double correlation_E(const TwoQubitState& s, double a, double b) {
    const Mat4 op = kron(analyzer(a), analyzer(b));
    return (s.rho * op).trace().real();
}

struct ChshSettings {
    double a = 0.0;
    double a2 = constants::pi / 4.0;
    double b = constants::pi / 8.0;
    double b2 = 3.0 * constants::pi / 8.0;

    /// Pairs in the order (a,b), (a,b'), (a',b), (a',b'); S = E0 - E1 + E2 + E3.
    std::array<std::pair<double, double>, 4> pairs() const { return {{{a, b}, {a, b2}, {a2, b}, {a2, b2}}}; }
};

inline constexpr std::array<double, 4> chsh_signs{1.0, -1.0, 1.0, 1.0};

struct ChshResult {
    double S = 0.0;
    double standard_error = 0.0;
    std::array<double, 4> E{};
    std::array<double, 4> E_stderr{};
    std::array<std::uint64_t, 4> trials{};
};

inline ChshResult chsh_analytic(const TwoQubitState& s, const ChshSettings& settings = {}) {
    ChshResult r;
    const auto pairs = settings.pairs();
    for (std::size_t k = 0; k < 4; ++k) {
        r.E[k] = correlation_E(s, pairs[k].first, pairs[k].second);
        r.S += chsh_signs[k] * r.E[k];
    }
    return r;
}

/// Sampled CHSH: trials cycle through the four settings; each trial draws a
/// joint outcome from the Born probabilities. Trials are sharded in blocks of
/// 2^16 with derived seeds, so the result does not depend on `workers`.
inline ChshResult chsh_sampled(const TwoQubitState& s, const ChshSettings& settings, std::uint64_t n_trials,
                               std::uint64_t seed, unsigned workers = 1) {
    require(n_trials >= 1, ErrorKind::domain, "need at least one trial");
    const auto pairs = settings.pairs();
    // Probabilities of (++, +-, -+, --) per setting.
    std::array<std::array<double, 4>, 4> prob{};
    for (std::size_t k = 0; k < 4; ++k) {
        int idx = 0;
        for (bool pa : {true, false}) {
            for (bool pb : {true, false}) {
                const Mat4 proj = kron(analyzer_projector(pairs[k].first, pa), analyzer_projector(pairs[k].second, pb));
                prob[k][idx++] = std::max(0.0, (s.rho * proj).trace().real());
            }
        }
    }

    constexpr std::uint64_t shard = 1u << 16;
    const std::uint64_t shards = (n_trials + shard - 1) / shard;
    struct Tally {
        std::array<std::uint64_t, 4> n{};
        std::array<std::int64_t, 4> sum{};
    };
    std::vector<Tally> tallies(shards);
    auto run = [&](std::uint64_t sh) {
        Rng rng(derive_seed(seed, sh));
        Tally& t = tallies[sh];
        const std::uint64_t end = std::min(n_trials, (sh + 1) * shard);
        for (std::uint64_t i = sh * shard; i < end; ++i) {
            const std::size_t k = i % 4;
            const double u = rng.uniform();
            const auto& p = prob[k];
            // ++ and -- give product +1.
            int product;
            if (u < p[0]) product = 1;
            else if (u < p[0] + p[1]) product = -1;
            else if (u < p[0] + p[1] + p[2]) product = -1;
            else product = 1;
            ++t.n[k];
            t.sum[k] += product;
        }
    };
    const unsigned w = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(shards)));
    if (w == 1) {
        for (std::uint64_t sh = 0; sh < shards; ++sh) run(sh);
    } else {
        std::vector<std::thread> pool;
        for (unsigned id = 0; id < w; ++id) {
            pool.emplace_back([&, id] {
                for (std::uint64_t sh = id; sh < shards; sh += w) run(sh);
            });
        }
        for (auto& th : pool) th.join();
    }

    ChshResult r;
    double var = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
        std::uint64_t n = 0;
        std::int64_t sum = 0;
        for (const auto& t : tallies) {
            n += t.n[k];
            sum += t.sum[k];
        }
        r.trials[k] = n;
        if (n == 0) continue;
        r.E[k] = static_cast<double>(sum) / static_cast<double>(n);
        r.E_stderr[k] = std::sqrt(std::max(0.0, 1.0 - r.E[k] * r.E[k]) / static_cast<double>(n));
        r.S += chsh_signs[k] * r.E[k];
        var += r.E_stderr[k] * r.E_stderr[k];
    }
    r.standard_error = std::sqrt(var);
    return r;
}

/// Largest S reachable by local deterministic strategies (each side outputs a
/// fixed +-1 per setting).
inline double local_deterministic_max_S() {
    double best = -4.0;
    for (int m = 0; m < 16; ++m) {
        const double A = (m & 1) ? 1 : -1;
        const double A2 = (m & 2) ? 1 : -1;
        const double B = (m & 4) ? 1 : -1;
        const double B2 = (m & 8) ? 1 : -1;
        best = std::max(best, A * B - A * B2 + A2 * B + A2 * B2);
    }
    return best;
}

enum class FidelityEstimator {
    werner_consistent, // F = (1 + 1.5 (v_zz + v_xx)) / 4
    two_visibility_bound, // F = (v_zz + v_xx) / 2
};

/// Bell-state fidelity from H/V and diagonal-basis visibilities.
inline double fidelity_from_visibilities(double v_zz, double v_xx,
                                         FidelityEstimator mode = FidelityEstimator::werner_consistent) {
    require(v_zz >= -1.0 && v_zz <= 1.0 && v_xx >= -1.0 && v_xx <= 1.0, ErrorKind::domain,
            "visibilities outside [-1, 1]");
    if (mode == FidelityEstimator::two_visibility_bound) return 0.5 * (v_zz + v_xx);
    // The unmeasured circular-basis visibility is taken as the mean of the other two.
    const double v_yy = 0.5 * (v_zz + v_xx);
    return 0.25 * (1.0 + v_zz + v_xx + v_yy);
}

} // namespace skylink
