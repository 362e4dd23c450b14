#pragma once

/// @file effective_dynamics.hpp
/// @brief Two-mode reduced system for the resonant pair k = ±1.
///
/// The reduced system is
///   u₁'  = -i(1 + 2K)u₁  - 2iJ u₋₁,
///   u₋₁' = -i(1 + 2K)u₋₁ - 2iJ u₁,
/// with J = |u₁|² + |u₋₁|² and K = 2 Re(u₁ ū₋₁), both conserved. Starting
/// from εα, εβ its solution is available in closed form.

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "beatnls/implicit_curve.hpp"
#include "beatnls/numeric.hpp"

namespace beatnls::dyn {

using cplx = std::complex<double>;

struct InitialData {
    cplx alpha{1.0, 0.0};
    cplx beta{0.0, 0.0};
    double eps = 0.1;
};

struct ReducedState {
    double t = 0.0;
    cplx u1{};
    cplx um1{};
};

struct ConservedSet {
    double J1 = 0.0;  ///< |u₁|² + |u₋₁|²
    double K1 = 0.0;  ///< 2 Re(u₁ ū₋₁)
    double G = 0.0;   ///< J1 + 2 K1 J1
};

inline void validate(const InitialData& d) {
    if (!(d.eps >= 0.0) || !std::isfinite(d.eps)) throw ValidationError("eps must be >= 0 and finite");
    if (!std::isfinite(std::abs(d.alpha)) || !std::isfinite(std::abs(d.beta))) {
        throw ValidationError("alpha and beta must be finite");
    }
}

/// Beating phase Θ = 2ε²(|α|² + |β|²)t.
inline double beating_phase(const InitialData& d, double t) {
    return 2.0 * d.eps * d.eps * (std::norm(d.alpha) + std::norm(d.beta)) * t;
}

/// Exact solution of the reduced system.
inline ReducedState closed_form_state(const InitialData& d, double t) {
    validate(d);
    const double e2 = d.eps * d.eps;
    const double theta = beating_phase(d, t);
    const double re_ab = std::real(d.alpha * std::conj(d.beta));
    const cplx pre = d.eps * std::exp(cplx(0.0, -(t + 4.0 * e2 * re_ab * t)));
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const cplx I(0.0, 1.0);
    return {t, pre * (d.alpha * c - I * d.beta * s), pre * (d.beta * c - I * d.alpha * s)};
}

inline ConservedSet conserved(const ReducedState& s) {
    ConservedSet c;
    c.J1 = std::norm(s.u1) + std::norm(s.um1);
    c.K1 = 2.0 * std::real(s.u1 * std::conj(s.um1));
    c.G = c.J1 + 2.0 * c.K1 * c.J1;
    return c;
}

/// Reduced Hamiltonian J1 + 2 K1 J1.
inline double reduced_hamiltonian_G(const ReducedState& s) { return conserved(s).G; }

enum class SupMode {
    exact,  ///< |u₁| + |u₋₁| of the closed form
    paper   ///< ε(√(|α|²cos²Θ + |β|²sin²Θ) + √(|β|²cos²Θ + |α|²sin²Θ)), phase-blind
};

inline SupMode parse_sup_mode(const std::string& s) {
    if (s == "exact") return SupMode::exact;
    if (s == "paper") return SupMode::paper;
    throw ValidationError("sup mode must be 'exact' or 'paper', got '" + s + "'");
}

/// sup_x |u₁e^{ix} + u₋₁e^{-ix}| along the effective solution.
///
/// In exact mode this is |u₁| + |u₋₁|, which picks up the cross term
/// Im(αβ̄) sin 2Θ. The paper mode drops that term; both agree when
/// Im(αβ̄) = 0.
inline double sup_norm_effective(const InitialData& d, double t, SupMode mode) {
    validate(d);
    if (mode == SupMode::exact) {
        const auto s = closed_form_state(d, t);
        return std::abs(s.u1) + std::abs(s.um1);
    }
    const double theta = beating_phase(d, t);
    const double c2 = std::cos(theta) * std::cos(theta);
    const double s2 = std::sin(theta) * std::sin(theta);
    const double a2 = std::norm(d.alpha);
    const double b2 = std::norm(d.beta);
    return d.eps * (std::sqrt(a2 * c2 + b2 * s2) + std::sqrt(b2 * c2 + a2 * s2));
}

/// Right-hand side of the reduced system.
inline std::pair<cplx, cplx> reduced_rhs(cplx u1, cplx um1) {
    const double J = std::norm(u1) + std::norm(um1);
    const double K = 2.0 * std::real(u1 * std::conj(um1));
    const cplx I(0.0, 1.0);
    const cplx a = -I * (1.0 + 2.0 * K);
    const cplx b = -I * (2.0 * J);
    return {a * u1 + b * um1, a * um1 + b * u1};
}

inline ReducedState rk4_step(const ReducedState& s, double h) {
    const auto [k1a, k1b] = reduced_rhs(s.u1, s.um1);
    const auto [k2a, k2b] = reduced_rhs(s.u1 + 0.5 * h * k1a, s.um1 + 0.5 * h * k1b);
    const auto [k3a, k3b] = reduced_rhs(s.u1 + 0.5 * h * k2a, s.um1 + 0.5 * h * k2b);
    const auto [k4a, k4b] = reduced_rhs(s.u1 + h * k3a, s.um1 + h * k3b);
    return {s.t + h, s.u1 + h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a),
            s.um1 + h / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b)};
}

/// Classical RK4 from (εα, εβ) to t_end. Every `stride`-th state is kept,
/// plus the terminal state; a shorter last step lands exactly on t_end.
inline std::vector<ReducedState> integrate_reduced(const InitialData& d, double t_end, double dt,
                                                   int stride = 1) {
    validate(d);
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt must be positive");
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ValidationError("t_end must be >= 0");
    if (stride < 1) throw ValidationError("stride must be >= 1");
    const auto n_full = static_cast<long long>(std::floor(t_end / dt));
    ReducedState s{0.0, d.eps * d.alpha, d.eps * d.beta};
    std::vector<ReducedState> out;
    out.reserve(static_cast<std::size_t>(n_full / stride + 2));
    out.push_back(s);
    for (long long n = 1; n <= n_full; ++n) {
        s = rk4_step(s, dt);
        s.t = static_cast<double>(n) * dt;
        if (!std::isfinite(std::abs(s.u1)) || !std::isfinite(std::abs(s.um1))) {
            throw ComputationError("reduced dynamics produced a non-finite state at t=" + std::to_string(s.t));
        }
        if (n % stride == 0) out.push_back(s);
    }
    const double rest = t_end - s.t;
    if (rest > 1e-14 * std::max(1.0, t_end)) {
        s = rk4_step(s, rest);
        s.t = t_end;
        out.push_back(s);
    } else if (out.back().t != s.t) {
        out.push_back(s);
    }
    return out;
}

struct RateBounds {
    double upper;  ///< -z₀²/(2σa²)
    double lower;  ///< -𝒥(z₀, τ)²/σa²
};

/// Bounds on the scaled log-probability at resonant times t = τε^{-2(1-δ)}.
inline RateBounds transient_rate_bounds(double z0, double tau, double sigma_a2) {
    if (!(sigma_a2 > 0.0)) throw ValidationError("sigma_a2 must be positive");
    const double J = curve::rate_J(z0, tau);
    return {-z0 * z0 / (2.0 * sigma_a2), -J * J / sigma_a2};
}

}  // namespace beatnls::dyn
