#pragma once

/// @file fixtures.hpp
/// @brief Calibrated constants, frozen with the recipe that produced them.
///
/// Each constant can be regenerated by the matching calibrate_* routine;
/// tests/test_fixtures.cpp checks that the frozen values still match.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "beatnls/implicit_curve.hpp"
#include "beatnls/rng.hpp"
#include "beatnls/spectral_pde.hpp"
#include "beatnls/tail_probability.hpp"

namespace beatnls::fixtures {

/// First index from which the μ fixed-point map contracts (ratio < 0.9) and
/// the μ bounds hold at 33 values of ζ, for 50 consecutive indices.
inline constexpr std::int64_t kJ0 = 5;

/// c in gap_sum ≥ c/(λ³τ²): half the minimum of gap_sum·λ³τ² over
/// τ ∈ (τ_{j-1}^∞, τ_j^∞], 16 samples per j, j ∈ [j₀, 500].
inline constexpr double kGapConstant = 0.99186706357958332;

/// C̃ in |y_{2j+1}(τ) - λ/√2| ≤ C̃λ/j on τ ∈ [τ_{j-1}, τ_{j+1}]: maximum of
/// j·(y_{2j+1} - λ/√2)/λ, 16 samples per j, j ∈ [j₀, 2000].
inline constexpr double kMinimalConstant = 0.74052323992528979;

/// C₁ in λ̃ = λ + C₁√τ·ε + √ε: smallest 2^k, k ∈ [-10, 10], with zero
/// inclusion violations over (τ, ε) ∈ {0.5, 5, 50}×{0.3, 0.1, 0.03},
/// 10⁵ samples each, λ = 1, c = 10, default seed. The floor of the grid is
/// returned because the √ε term alone already suffices there.
inline constexpr double kC1 = 0.0009765625;

/// C₂ in λ = z₀ - C₂ε^{(1-δ)/2}: twice the normal-form sup gap at ε = 0.2,
/// scaled by ε^{-3/2}; data α = 1, β = 0.5 + 0.3i, τ = ε²t = 1, N = 64, dt = 1e-3.
inline constexpr double kC2 = 0.29786752295156049;

inline const std::vector<double> kInclusionTaus{0.5, 5.0, 50.0};
inline const std::vector<double> kInclusionEps{0.3, 0.1, 0.03};

struct Provenance {
    std::string name;
    double value;
    std::string recipe;
};

inline std::vector<Provenance> provenance() {
    return {
        {"j0", static_cast<double>(kJ0), "mu fixed point contracts (<0.9) with bounds on 33 zeta values for 50 consecutive j"},
        {"gap_constant", kGapConstant, "0.5*min gap_sum*lambda^3*tau^2, j in [j0,500], 16 tau per j"},
        {"minimal_constant", kMinimalConstant, "max j*(y_{2j+1}-lambda/sqrt2)/lambda, j in [j0,2000], tau in [tau_{j-1},tau_{j+1}]"},
        {"C1", kC1, "smallest 2^k, k in [-10,10], zero inclusion violations, 1e5 samples per (tau,eps)"},
        {"C2", kC2, "2*sup_gap(eps=0.2)/0.2^1.5, alpha=1, beta=0.5+0.3i, tau=1, N=64, dt=1e-3"},
    };
}

inline std::int64_t calibrate_j0() { return curve::empirical_j0(33, 0.9, 50); }

inline double calibrate_gap_constant() { return curve::calibrate_gap_constant(kJ0, 500, 16); }

inline double calibrate_minimal_constant() { return curve::calibrate_minimal_constant(kJ0, 2000, 16); }

/// Total inclusion violations over the test grid for a given C₁.
inline std::int64_t inclusion_violations(double c1, std::int64_t n = 100000, std::uint64_t seed = kDefaultSeed) {
    std::int64_t v = 0;
    for (double tau : kInclusionTaus) {
        for (double eps : kInclusionEps) v += tail::inclusion_check(tau, eps, 1.0, c1, 10.0, n, seed).violations;
    }
    return v;
}

inline double calibrate_c1(std::int64_t n = 100000) {
    for (int k = -10; k <= 10; ++k) {
        const double c1 = std::ldexp(1.0, k);
        if (inclusion_violations(c1, n) == 0) return c1;
    }
    throw ComputationError("no C1 on the grid 2^[-10,10] passes the inclusion check");
}

inline dyn::InitialData gap_reference_data(double eps) { return {{1.0, 0.0}, {0.5, 0.3}, eps}; }

inline double calibrate_c2() {
    const double eps = 0.2;
    pde::PdeRunConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 1.0 / (eps * eps);
    cfg.sample_every = 50;
    const auto g = pde::compare_to_normal_form(cfg, gap_reference_data(eps), 0.0);
    return 2.0 * g.sup_gap / std::pow(eps, 1.5);
}

}  // namespace beatnls::fixtures
