#pragma once

/// @file verify.hpp
/// @brief Desk-scale invariant suites behind `beatnls verify`.
///
/// Each check records the measured quantity next to the threshold it is
/// compared with, so a report can be read without rerunning anything.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "beatnls/commands.hpp"
#include "beatnls/config.hpp"
#include "beatnls/effective_dynamics.hpp"
#include "beatnls/fixtures.hpp"
#include "beatnls/implicit_curve.hpp"
#include "beatnls/rng.hpp"
#include "beatnls/spectral_pde.hpp"
#include "beatnls/tail_probability.hpp"

namespace beatnls::verify {

struct Check {
    std::string suite;
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double threshold = 0.0;
    std::string detail;
};

using Checks = std::vector<Check>;

inline const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> s{"implicit-curve", "effective-dynamics", "spectral-pde", "tail-probability",
                                            "cli-harness"};
    return s;
}

inline Check at_most(double measured, double threshold, std::string detail = {}) {
    return {"", "", measured <= threshold, measured, threshold, std::move(detail)};
}

inline Check at_least(double measured, double threshold, std::string detail = {}) {
    return {"", "", measured >= threshold, measured, threshold, std::move(detail)};
}

namespace detail {

/// Runs `f`, turning an unexpected exception into a failed check.
inline void guarded(Checks& out, const std::string& suite, const std::string& name, const std::function<Check()>& f) {
    try {
        Check c = f();
        c.suite = suite;
        c.name = name;
        out.push_back(std::move(c));
    } catch (const std::exception& e) {
        out.push_back({suite, name, false, std::numeric_limits<double>::quiet_NaN(), 0.0,
                       std::string("exception: ") + e.what()});
    }
}

/// Roots of ξh(ξ)² = 2τλ² on [lo, hi] by a uniform sign scan refined with bisection.
inline std::vector<double> sign_scan_roots(double tau, double lambda, double lo, double hi, double step) {
    auto g = [&](double x) {
        const double h = curve::h_eval(x);
        return x * h * h - 2.0 * tau * lambda * lambda;
    };
    std::vector<double> roots;
    const auto n = static_cast<std::int64_t>(std::ceil((hi - lo) / step));
    double x0 = lo;
    double g0 = g(x0);
    for (std::int64_t i = 1; i <= n; ++i) {
        const double x1 = std::min(hi, lo + static_cast<double>(i) * step);
        const double g1 = g(x1);
        if (g0 == 0.0) {
            roots.push_back(x0);
        } else if ((g0 < 0.0) != (g1 < 0.0) && g1 != 0.0) {
            roots.push_back(bisect(g, x0, x1, 1e-14));
        }
        x0 = x1;
        g0 = g1;
    }
    if (g0 == 0.0) roots.push_back(x0);
    return roots;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// implicit-curve

inline Checks implicit_curve_suite() {
    using namespace curve;
    const std::string S = "implicit-curve";
    Checks out;
    const double s2 = std::numbers::sqrt2;

    detail::guarded(out, S, "h_range_and_quarter_period", [] {
        const CounterRng rng(kDefaultSeed, 1);
        double worst = 0.0;
        bool in_range = true;
        for (std::uint64_t i = 0; i < 10000; ++i) {
            const double x = 200.0 * rng.uniform(i);
            const double h = h_eval(x);
            if (h < 1.0 - 1e-15 || h > std::numbers::sqrt2 + 1e-15) in_range = false;
            worst = std::max(worst, std::abs(h_eval(x + kQuarter) - h) / std::max(1.0, x));
        }
        Check c = at_most(worst, 1e-14, "max |h(x+pi/2)-h(x)|/max(1,x)");
        c.pass = c.pass && in_range;
        return c;
    });

    detail::guarded(out, S, "h_deriv_matches_finite_difference", [] {
        const CounterRng rng(kDefaultSeed, 2);
        double worst = 0.0;
        for (std::uint64_t i = 0; i < 2000; ++i) {
            const double q = std::floor(40.0 * rng.uniform(2 * i));
            const double x = (q + 0.05 + 0.9 * rng.uniform(2 * i + 1)) * kQuarter;
            const double fd = (h_eval(x + 1e-7) - h_eval(x - 1e-7)) / 2e-7;
            worst = std::max({worst, std::abs(h_deriv(x, Side::left) - fd), std::abs(h_deriv(x, Side::right) - fd)});
        }
        return at_most(worst, 1e-6, "max |h' - central difference|");
    });

    detail::guarded(out, S, "enumerate_residual_and_window", [] {
        double worst = 0.0;
        bool window = true;
        for (int i = 0; i <= 400; ++i) {
            const double tau = 1e-3 * std::pow(1e5, i / 400.0);
            for (const auto& v : enumerate_solutions(tau, 1.0)) {
                worst = std::max(worst, std::abs(v.y * h_eval(2.0 * tau * v.y * v.y) - 1.0));
                if (v.y < 1.0 / std::numbers::sqrt2 - kDefaultRootTol || v.y > 1.0 + kDefaultRootTol) window = false;
            }
        }
        Check c = at_most(worst, 10 * kDefaultRootTol, "max |y h(2 tau y^2) - lambda| over 401 tau in [1e-3, 100]");
        c.pass = c.pass && window;
        return c;
    });

    detail::guarded(out, S, "enumerate_matches_sign_scan", [] {
        const double tau = 5.0;
        const auto scan = detail::sign_scan_roots(tau, 1.0, tau, 2.0 * tau, 1e-5);
        const auto roots = enumerate_solutions(tau, 1.0);
        if (scan.size() != roots.size()) return Check{"", "", false, static_cast<double>(roots.size()),
                                                      static_cast<double>(scan.size()), "root count differs"};
        double worst = 0.0;
        for (std::size_t i = 0; i < scan.size(); ++i) worst = std::max(worst, std::abs(scan[i] - roots[i].xi));
        return at_most(worst, 1e-9, "max |xi - sign-scan xi| at tau=5");
    });

    detail::guarded(out, S, "sweep_ordering_and_monotonicity", [] {
        std::map<std::int64_t, double> prev;
        std::int64_t violations = 0;
        const double slack = 1e-10;
        for (int i = 0; i <= 10000; ++i) {
            const double tau = 0.01 + 1e-3 * i;
            const auto roots = enumerate_solutions(tau, 1.0);
            std::map<std::int64_t, double> now;
            for (std::size_t k = 0; k < roots.size(); ++k) {
                if (k > 0 && !(roots[k].y > roots[k - 1].y && roots[k].branch_index > roots[k - 1].branch_index)) {
                    ++violations;
                }
                now[roots[k].branch_index] = roots[k].y;
                if (roots[k].partner_index != 0) now[roots[k].partner_index] = roots[k].y;
            }
            for (auto& [b, y] : now) {
                const auto it = prev.find(b);
                if (it == prev.end()) continue;
                const std::int64_t j = (b + 1) / 2;
                const bool decreasing = b % 2 == 0 || tau <= tau_j(j, 1.0);
                if (decreasing && y > it->second + slack) ++violations;
                if (!decreasing && tau - 1e-3 >= tau_j(j, 1.0) && y < it->second - slack) ++violations;
            }
            prev = std::move(now);
        }
        return at_most(static_cast<double>(violations), 0.0, "ordering or monotonicity violations over tau in [0.01, 10.01]");
    });

    detail::guarded(out, S, "collision_offset_sandwich", [s2] {
        std::int64_t bad = 0;
        for (std::int64_t j = fixtures::kJ0; j <= 10000; ++j) {
            const double off = collision(j, 1.0).offset;
            const double jd = static_cast<double>(j);
            if (off < 1.0 / (s2 * kPi * jd) || off > s2 / (kPi * (jd - 0.5))) ++bad;
        }
        return at_most(static_cast<double>(bad), 0.0, "violations for j in [j0, 1e4]");
    });

    detail::guarded(out, S, "collision_time_ordering", [] {
        std::int64_t bad = 0;
        for (std::int64_t j = 1; j <= 10000; ++j) {
            const auto c = collision(j, 1.0);
            if (!(tau_j(j, 1.0) < c.tau && c.tau < tau_j(j + 1, 1.0)) || !(c.tau_excess > 0.0)) ++bad;
        }
        return at_most(static_cast<double>(bad), 0.0, "violations of tau_j < tau_inf_j < tau_{j+1}, j <= 1e4");
    });

    detail::guarded(out, S, "collision_excess_bounded", [] {
        double mx = 0.0;
        for (std::int64_t j = fixtures::kJ0; j <= 10000; ++j) {
            mx = std::max(mx, static_cast<double>(j) * collision(j, 1.0).tau_excess);
        }
        const double at_j0 = static_cast<double>(fixtures::kJ0) * collision(fixtures::kJ0, 1.0).tau_excess;
        return at_most(mx, 2.0 * at_j0, "max j*(tau_inf_j - tau_j) vs twice its value at j0");
    });

    detail::guarded(out, S, "mu_fixed_point_vs_bisection", [] {
        double worst = 0.0;
        bool bounds = true;
        for (std::int64_t j : {100, 1000}) {
            for (double z : zeta_grid(33)) {
                const auto s = mu_solution(j, z);
                const double tau = (kPi * static_cast<double>(j) - 1.5 * kPi + z) / 2.0;
                const auto lo = branch_value(2 * j - 1, tau, 1.0);
                const auto hi = branch_value(2 * j, tau, 1.0);
                if (!lo || !hi) return Check{"", "", false, 0.0, 0.0, "branch missing"};
                worst = std::max({worst, std::abs(lo->xi - s.xi_minus), std::abs(hi->xi - s.xi_plus)});
                const auto b = mu_bounds(j, z);
                if (s.mu_minus < 0.0 || s.mu_minus > b.minus_hi || s.mu_plus < b.plus_lo || s.mu_plus > b.plus_hi) {
                    bounds = false;
                }
            }
        }
        Check c = at_most(worst, 1e-9, "max |xi fixed point - xi bisection|, j in {100, 1000}");
        c.pass = c.pass && bounds;
        return c;
    });

    detail::guarded(out, S, "lambda_perturbation_monotone_lipschitz", [] {
        bool ok = true;
        double worst_ratio = 0.0;
        for (std::int64_t j : {3, 10, 40}) {
            const double tau = 0.5 * (birth_tau(j, 1.0) + collision(j, 1.0).tau);
            for (std::int64_t b : {2 * j - 1, 2 * j}) {
                double L_prev = -1.0;
                for (double h : {1e-3, 1e-4, 1e-5}) {
                    double L = 0.0;
                    double y_prev = std::numeric_limits<double>::quiet_NaN();
                    for (int k = -2; k <= 2; ++k) {
                        const auto v = branch_value(b, tau, 1.0 + k * h);
                        if (!v) return Check{"", "", false, 0.0, 0.0, "branch left its existence interval"};
                        if (!std::isnan(y_prev)) {
                            const double d = v->y - y_prev;
                            if ((b % 2 == 1 && d < -1e-13) || (b % 2 == 0 && d > 1e-13)) ok = false;
                            L = std::max(L, std::abs(d) / h);
                        }
                        y_prev = v->y;
                    }
                    if (L_prev > 0.0) worst_ratio = std::max(worst_ratio, L / L_prev);
                    L_prev = L;
                }
            }
        }
        Check c = at_most(worst_ratio, 1.1, "max ratio of divided-difference slopes under grid refinement");
        c.pass = c.pass && ok;
        return c;
    });

    detail::guarded(out, S, "rate_range_and_right_continuity", [s2] {
        bool range = true;
        for (int i = 0; i <= 1000; ++i) {
            const double J = rate_J(1.0, 1e-4 * std::pow(1e6, i / 1000.0));
            if (J < 1.0 / s2 - kDefaultRootTol || J > 1.0 + kDefaultRootTol) range = false;
        }
        double worst = 0.0;
        bool jumps = true;
        for (std::int64_t j = 1; j <= 20; ++j) {
            const double t = collision(j, 1.0).tau;
            const auto at = rate_function(1.0, t);
            const double left = minimal_solution_Y(t, 1.0);
            if (!at.is_jump || !(at.J > left)) jumps = false;
            worst = std::max(worst, std::abs(rate_J(1.0, t + 1e-9) - at.J));
        }
        Check c = at_most(worst, 1e-7, "max |J(tau_inf + 1e-9) - J(tau_inf)|, j <= 20");
        c.pass = c.pass && range && jumps;
        return c;
    });

    detail::guarded(out, S, "rate_limits", [s2] {
        double worst = std::abs(rate_J(1.0, 1e-4) - 1.0) / 1e-3;
        for (std::int64_t j : {100, 1000, 10000}) {
            const double gap = std::abs(rate_J(1.0, tau_j(j, 1.0)) - 1.0 / s2);
            worst = std::max(worst, gap / (2.0 * fixtures::kMinimalConstant / static_cast<double>(j)));
        }
        return at_most(worst, 1.0, "largest ratio of limit gap to its allowance");
    });

    detail::guarded(out, S, "gap_lower_bound", [] {
        double worst = std::numeric_limits<double>::infinity();
        for (std::int64_t j = fixtures::kJ0 + 1; j <= 200; ++j) {
            const double a = collision(j - 1, 1.0).tau;
            const double b = collision(j, 1.0).tau;
            for (int k = 1; k <= 8; ++k) {
                const auto g = branch_gap_lower_bound_check(a + (b - a) * k / 8.0, 1.0, fixtures::kGapConstant,
                                                            fixtures::kJ0);
                worst = std::min(worst, g.gap_sum / g.bound);
            }
        }
        return at_least(worst, 1.0, "min gap_sum / bound, j in (j0, 200]");
    });

    detail::guarded(out, S, "fixture_j0_recomputes", [] {
        const auto j0 = fixtures::calibrate_j0();
        return Check{"", "", j0 == fixtures::kJ0, static_cast<double>(j0), static_cast<double>(fixtures::kJ0),
                     "empirical j0 vs frozen"};
    });
    return out;
}

// ---------------------------------------------------------------------------
// effective-dynamics

inline double trajectory_error(const dyn::InitialData& d, double t_end, double dt) {
    const auto tr = dyn::integrate_reduced(d, t_end, dt, 1 << 30);
    const auto& s = tr.back();
    const auto e = dyn::closed_form_state(d, s.t);
    return std::abs(s.u1 - e.u1) + std::abs(s.um1 - e.um1);
}

inline Checks effective_dynamics_suite() {
    using namespace dyn;
    const std::string S = "effective-dynamics";
    Checks out;

    detail::guarded(out, S, "closed_form_initial_and_transfer", [] {
        const InitialData d{{0.7, -0.2}, {0.1, 0.4}, 0.1};
        const auto s0 = closed_form_state(d, 0.0);
        double e = std::abs(s0.u1 - d.eps * d.alpha) + std::abs(s0.um1 - d.eps * d.beta);
        const InitialData d2{{1.3, 0.4}, {0.0, 0.0}, 0.1};
        const double t = (std::numbers::pi / 2) / (2.0 * d2.eps * d2.eps * std::norm(d2.alpha));
        const auto s = closed_form_state(d2, t);
        e = std::max({e, std::abs(s.u1), std::abs(std::abs(s.um1) - d2.eps * std::abs(d2.alpha))});
        return at_most(e, 1e-14, "initial condition and complete transfer");
    });

    detail::guarded(out, S, "closed_form_residual", [] {
        const CounterRng rng(kDefaultSeed, 3);
        double worst = 0.0;
        for (std::uint64_t i = 0; i < 50; ++i) {
            const std::complex<double> a{rng.uniform(6 * i) - 0.5, rng.uniform(6 * i + 1) - 0.5};
            const std::complex<double> b{rng.uniform(6 * i + 2) - 0.5, rng.uniform(6 * i + 3) - 0.5};
            const double eps = 0.5 * rng.uniform(6 * i + 4);
            const double t = 100.0 * rng.uniform(6 * i + 5);
            const InitialData d{a, b, eps};
            const double h = 1e-6;
            const auto p = closed_form_state(d, t + h);
            const auto m = closed_form_state(d, t - h);
            const auto s = closed_form_state(d, t);
            const auto [f1, f2] = reduced_rhs(s.u1, s.um1);
            const double r = std::abs((p.u1 - m.u1) / (2 * h) - f1) + std::abs((p.um1 - m.um1) / (2 * h) - f2);
            worst = std::max(worst, r / std::max(eps, 1e-300));
        }
        return at_most(worst, 1e-4, "max residual / eps");
    });

    const InitialData ref{{1.0, 0.0}, {0.0, 0.0}, 0.1};
    const double horizon = 5.0 * std::numbers::pi / (ref.eps * ref.eps);  // ten beating periods

    detail::guarded(out, S, "rk4_terminal_error", [&] {
        return at_most(trajectory_error(ref, horizon, 2e-3) / ref.eps, 1e-8, "terminal error / eps, ten periods");
    });

    detail::guarded(out, S, "rk4_convergence_order", [&] {
        const double e1 = trajectory_error(ref, horizon, 0.01);
        const double e2 = trajectory_error(ref, horizon, 0.005);
        const double e3 = trajectory_error(ref, horizon, 0.0025);
        const double p1 = std::log2(e1 / e2);
        const double p2 = std::log2(e2 / e3);
        Check c = at_least(std::min(p1, p2), 3.8, "observed orders " + format_g(p1) + ", " + format_g(p2));
        c.pass = c.pass && std::max(p1, p2) <= 4.2;
        return c;
    });

    detail::guarded(out, S, "rk4_conservation", [&] {
        const InitialData d{{1.0, 0.0}, {0.5, 0.3}, 0.1};
        const auto tr = integrate_reduced(d, horizon, 2e-3, 100);
        const auto c0 = conserved(tr.front());
        double w = 0.0;
        for (const auto& s : tr) {
            const auto c = conserved(s);
            w = std::max({w, std::abs(c.J1 - c0.J1) / c0.J1, std::abs(c.K1 - c0.K1) / c0.J1,
                          std::abs(c.G - c0.G) / std::abs(c0.G)});
        }
        return at_most(w, 1e-9, "max relative drift of J1, K1 (scaled by J1) and G");
    });

    detail::guarded(out, S, "amplitude_sandwich", [] {
        const InitialData d{{1.0, 0.2}, {-0.4, 0.3}, 0.2};
        double worst = 0.0;
        for (int i = 0; i <= 2000; ++i) {
            const auto s = closed_form_state(d, 0.5 * i);
            const double l1 = std::abs(s.u1) + std::abs(s.um1);
            const double r = std::sqrt(conserved(s).J1);
            worst = std::max({worst, r - l1, l1 - std::numbers::sqrt2 * r});
        }
        return at_most(worst, 1e-15, "max violation of sqrt(J1) <= |u1|+|u-1| <= sqrt(2 J1)");
    });

    detail::guarded(out, S, "time_minimum_at_quarter_phases", [] {
        const InitialData d{{1.0, 0.0}, {0.5, 0.3}, 0.1};
        const int n = 20000;
        const double rate = 2.0 * d.eps * d.eps * (std::norm(d.alpha) + std::norm(d.beta));
        double best = std::numeric_limits<double>::infinity();
        double arg = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double th = std::numbers::pi * i / n;
            const double v = sup_norm_effective(d, th / rate, SupMode::paper);
            if (v < best) {
                best = v;
                arg = th;
            }
        }
        const double to_quarter = std::min({arg, std::abs(arg - std::numbers::pi / 2), std::numbers::pi - arg});
        const double floor = d.eps * (std::abs(d.alpha) + std::abs(d.beta));
        Check c = at_most(to_quarter, std::numbers::pi / n, "distance of the minimiser to {0, pi/2, pi}");
        c.pass = c.pass && best >= floor * (1.0 - 1e-14) && best <= floor * (1.0 + 1e-12);
        return c;
    });

    detail::guarded(out, S, "transient_bounds_limits", [] {
        const auto small = transient_rate_bounds(1.0, 1e-6, 1.0);
        const auto large = transient_rate_bounds(1.0, curve::tau_j(10000, 1.0), 1.0);
        const double e = std::max({std::abs(small.upper + 0.5), std::abs(small.lower + 1.0),
                                   std::abs(large.lower - large.upper)});
        bool ordered = true;
        for (int i = 0; i <= 200; ++i) {
            const auto b = transient_rate_bounds(1.0, 1e-3 * std::pow(1e5, i / 200.0), 1.0);
            if (b.upper < b.lower) ordered = false;
        }
        Check c = at_most(e, 1e-3, "limits of the bounds as tau -> 0 and tau -> infinity");
        c.pass = c.pass && ordered;
        return c;
    });
    return out;
}

// ---------------------------------------------------------------------------
// spectral-pde

inline Checks spectral_pde_suite() {
    const std::string S = "spectral-pde";
    Checks out;

    detail::guarded(out, S, "substep_modulus_preservation", [] {
        const dyn::InitialData d{{1.0, 0.0}, {0.5, 0.3}, 0.2};
        pde::FourierField f = pde::init_two_mode(d, 64);
        pde::StrangStepper st(64, false);
        FftPlan plan(64);
        double worst = 0.0;
        for (int s = 0; s < 2000; ++s) {
            const auto before = f.c;
            st.linear(f, 5e-4);
            for (std::size_t i = 0; i < f.c.size(); ++i) worst = std::max(worst, std::abs(std::abs(f.c[i]) - std::abs(before[i])));
            const auto g0 = pde::to_grid(f, plan);
            st.nonlinear(f, 1e-3);
            const auto g1 = pde::to_grid(f, plan);
            for (std::size_t i = 0; i < g0.size(); ++i) worst = std::max(worst, std::abs(std::abs(g1[i]) - std::abs(g0[i])));
            st.linear(f, 5e-4);
        }
        return at_most(worst, 1e-13, "max modulus change in a substep");
    });

    detail::guarded(out, S, "mass_and_energy_drift", [] {
        const dyn::InitialData d{{1.0, 0.0}, {0.5, 0.3}, 0.1};
        pde::PdeRunConfig cfg;
        const auto tr = pde::solve_pde(cfg, d);
        double dm = 0.0;
        double de = 0.0;
        for (const auto& s : tr) {
            dm = std::max(dm, std::abs(s.mass - tr.front().mass) / tr.front().mass);
            de = std::max(de, std::abs(s.energy - tr.front().energy) / std::abs(tr.front().energy));
        }
        Check c = at_most(de, 1e-8, "energy drift; mass drift " + format_g(dm));
        c.pass = c.pass && dm <= 1e-10;
        c.measured = std::max(de, dm);
        return c;
    });

    detail::guarded(out, S, "beating_period", [] {
        const dyn::InitialData d{{1.0, 0.0}, {0.0, 0.0}, 0.1};
        const double period = std::numbers::pi / (2.0 * d.eps * d.eps * std::norm(d.alpha));
        pde::PdeRunConfig cfg;
        cfg.t_end = 2.5 * period;
        cfg.sample_every = 10;
        const auto tr = pde::solve_pde(cfg, d);
        const double level = 0.5 * d.eps * d.eps * std::norm(d.alpha);
        std::vector<double> down;
        for (std::size_t i = 1; i < tr.size(); ++i) {
            const double a = std::norm(tr[i - 1].field.coeff(1)) - level;
            const double b = std::norm(tr[i].field.coeff(1)) - level;
            if (a > 0.0 && b <= 0.0) down.push_back(tr[i - 1].t + (tr[i].t - tr[i - 1].t) * a / (a - b));
        }
        if (down.size() < 3) return Check{"", "", false, static_cast<double>(down.size()), 3.0, "too few crossings"};
        const double measured = 0.5 * (down[2] - down[0]);
        return at_most(std::abs(measured / period - 1.0), 0.02, "relative period error over two periods");
    });

    detail::guarded(out, S, "resolution_stability", [] {
        const dyn::InitialData d{{1.0, 0.0}, {0.5, 0.3}, 0.2};
        pde::PdeRunConfig a;
        a.t_end = 25.0;
        a.sample_every = 1000;
        pde::PdeRunConfig b = a;
        b.n = 128;
        const auto ra = pde::pde_table(pde::solve_pde(a, d), d);
        const auto rb = pde::pde_table(pde::solve_pde(b, d), d);
        double worst = 0.0;
        for (std::size_t i = 0; i < std::min(ra.size(), rb.size()); ++i) {
            worst = std::max(worst, std::abs(ra[i].sup_pde - rb[i].sup_pde));
        }
        return at_most(worst, 1e-10, "max sup-norm change from N=64 to N=128");
    });

    detail::guarded(out, S, "normal_form_gap_slopes", [] {
        std::vector<double> le;
        std::vector<double> lg;
        std::vector<double> lt;
        for (double eps : {0.2, 0.1, 0.05}) {
            pde::PdeRunConfig cfg;
            cfg.t_end = 1.0 / (eps * eps);
            cfg.sample_every = 50;
            const auto g = pde::compare_to_normal_form(cfg, fixtures::gap_reference_data(eps), 0.0);
            le.push_back(std::log(eps));
            lg.push_back(std::log(g.sup_gap));
            lt.push_back(std::log(g.tail_mass));
        }
        auto slope = [&](const std::vector<double>& y) {
            const double mx = (le[0] + le[1] + le[2]) / 3.0;
            const double my = (y[0] + y[1] + y[2]) / 3.0;
            double sxy = 0.0;
            double sxx = 0.0;
            for (int i = 0; i < 3; ++i) {
                sxy += (le[i] - mx) * (y[i] - my);
                sxx += (le[i] - mx) * (le[i] - mx);
            }
            return sxy / sxx;
        };
        const double sg = slope(lg);
        const double st = slope(lt);
        return at_least(std::min(sg, st), 1.4, "slopes: sup_gap " + format_g(sg) + ", tail_mass " + format_g(st));
    });
    return out;
}

// ---------------------------------------------------------------------------
// tail-probability

/// Plain Monte Carlo of P(f(a, b) > z) for Rayleigh moduli; returns (p, standard error).
template <class F>
std::pair<double, double> rayleigh_mc(const tail::VariancePair& v, std::int64_t n, std::uint64_t stream, F&& event) {
    const CounterRng rng(kDefaultSeed, stream);
    std::int64_t hits = 0;
    for (std::int64_t i = 0; i < n; ++i) {
        const auto c = static_cast<std::uint64_t>(2 * i);
        if (event(rng.rayleigh(c, v.sigma_a2), rng.rayleigh(c + 1, v.sigma_b2))) ++hits;
    }
    const double p = static_cast<double>(hits) / static_cast<double>(n);
    return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(n))};
}

inline Checks tail_probability_suite() {
    using namespace tail;
    const std::string S = "tail-probability";
    Checks out;

    detail::guarded(out, S, "closed_tails_vs_monte_carlo", [] {
        double worst = 0.0;
        std::uint64_t stream = 100;
        for (const VariancePair v : {VariancePair{1.0, 1.0}, VariancePair{2.0, 1.0}}) {
            for (double z : {1.0, 2.0, 3.0}) {
                const auto [p2, se2] = rayleigh_mc(v, 1000000, ++stream, [z](double a, double b) { return 2.0 * (a * a + b * b) > z * z; });
                const auto [p1, se1] = rayleigh_mc(v, 1000000, ++stream, [z](double a, double b) { return a + b > z; });
                worst = std::max({worst, std::abs(l2_tail(z, v) - p2) / se2, std::abs(l1_tail(z, v) - p1) / se1});
            }
        }
        return at_most(worst, 3.0, "max |closed - MC| / standard error, 1e6 samples");
    });

    detail::guarded(out, S, "l2_equal_variance_value_and_limit", [] {
        double e = std::abs(l2_tail(2.0, {1.0, 1.0}) - 3.0 * std::exp(-2.0));
        for (double g : {1e-3, 1e-5, 1e-7}) {
            e = std::max(e, std::abs(l2_tail(2.0, {1.0 + g, 1.0}) - l2_tail(2.0, {1.0, 1.0})) / g);
        }
        return at_most(e, 1.0, "value error and |distinct - equal|/gap");
    });

    detail::guarded(out, S, "l1_scaled_limit", [] {
        const VariancePair v{2.0, 1.0};
        const double target = -1.0 / 3.0;
        double prev = std::numeric_limits<double>::infinity();
        bool monotone = true;
        double last = 0.0;
        for (double lam : {5.0, 10.0, 20.0}) {
            const double g = std::abs(log_l1_tail(lam, v) / (lam * lam) - target);
            if (!(g < prev)) monotone = false;
            prev = g;
            last = g;
        }
        Check c = at_most(last, 0.05 * std::abs(target), "gap to -z0^2/(sa2+sb2) at lambda = 20");
        c.pass = c.pass && monotone;
        return c;
    });

    detail::guarded(out, S, "region_set_sandwich", [] {
        const CounterRng rng(kDefaultSeed, 7);
        double worst = -1.0;
        std::int64_t misses = 0;
        for (std::uint64_t i = 0; i < 200000; ++i) {
            const double a = 3.0 * rng.uniform(4 * i);
            const double b = 3.0 * rng.uniform(4 * i + 1);
            const double tau = std::pow(10.0, -4.0 + 6.0 * rng.uniform(4 * i + 2));
            if (region_A_member(a, b, tau, 1.0, 10.0)) {
                worst = std::max(worst, 1.0 - 1e-12 - std::numbers::sqrt2 * std::hypot(a, b));
            }
            if (a + b >= 1.01 && !region_A_member(a, b, 1e-3 * rng.uniform(4 * i + 3), 1.0, 10.0)) ++misses;
        }
        Check c = at_most(worst, 0.0, "envelope violation; small-tau misses " + std::to_string(misses));
        c.pass = c.pass && misses == 0;
        return c;
    });

    detail::guarded(out, S, "inclusion_with_calibrated_c1", [] {
        return at_most(static_cast<double>(fixtures::inclusion_violations(fixtures::kC1)), 0.0,
                       "violations over the 3x3 (tau, eps) grid, 1e5 samples each");
    });

    detail::guarded(out, S, "quadrature_vs_monte_carlo", [] {
        RegimeSpec s;
        s.c2 = fixtures::kC2;
        const VariancePair v{2.0, 1.0};
        double worst = 0.0;
        for (double eps : {0.3, 0.2, 0.1}) {
            const auto q = log_tail_quadrature(s, v, eps);
            const auto m = log_tail_monte_carlo(s, v, eps, {});
            worst = std::max(worst, std::abs(q.log_p - m.log_p) / std::hypot(q.err, m.err));
        }
        return at_most(worst, 3.0, "max |quadrature - MC| / combined error");
    });

    detail::guarded(out, S, "tilted_vs_direct_sampling", [] {
        RegimeSpec s;
        s.c2 = fixtures::kC2;
        const VariancePair v{2.0, 1.0};
        MonteCarloOptions o;
        o.theta = 0.0;
        const auto m = log_tail_monte_carlo(s, v, 0.5, o);
        const auto d = log_tail_direct_sampling(s, v, 0.5, 1000000, kDefaultSeed);
        return at_most(std::abs(m.log_p - d.log_p) / std::hypot(m.err, d.err), 3.0,
                       "|importance sampler at theta=0 - effective-dynamics sampler| / combined error");
    });

    detail::guarded(out, S, "quadrature_monotonicity", [] {
        std::int64_t bad = 0;
        std::vector<std::vector<double>> lp(5, std::vector<double>(5));
        for (int i = 0; i < 5; ++i) {
            for (int k = 0; k < 5; ++k) {
                RegimeSpec s;
                s.z0 = 0.8 + 0.1 * i;
                s.cutoff_c = 13.0;
                const VariancePair v{1.5 + 0.25 * k, 1.0};
                lp[i][k] = log_tail_quadrature(s, v, 0.1).log_p;
            }
        }
        for (int i = 0; i < 5; ++i) {
            for (int k = 0; k < 5; ++k) {
                if (i > 0 && lp[i][k] > lp[i - 1][k]) ++bad;
                if (k > 0 && lp[i][k] < lp[i][k - 1]) ++bad;
            }
        }
        return at_most(static_cast<double>(bad), 0.0, "order violations on the 5x5 (z0, sigma_a2) grid");
    });

    detail::guarded(out, S, "resonant_bracketing_small_eps", [] {
        RegimeSpec s;
        s.gamma = 2.0 * (1.0 - s.delta);
        s.c2 = fixtures::kC2;
        const VariancePair v{2.0, 1.0};
        const auto rows = ldp_sweep(s, v, {1e-2, 1e-4, 1e-6, 1e-8});
        const auto& r = rows.back();
        const double slack = 0.05 * s.z0 * s.z0 / v.sigma_a2;
        const double x = r.estimate.scaled;
        Check c{"", "", x >= r.target.lower - slack && x <= r.target.upper + slack, x, r.target.upper + slack,
                "interval [" + format_g(r.target.lower - slack) + ", " + format_g(r.target.upper + slack) +
                    "] at eps = 1e-8"};
        return c;
    });

    detail::guarded(out, S, "regime_targets_small_eps", [] {
        double worst = 0.0;
        std::string d;
        struct Case {
            double gamma, sa, sb, eps;
        };
        for (const Case k : {Case{0.0, 2.0, 1.0, 1e-8}, Case{1.6, 2.0, 1.0, 1e-8}, Case{0.0, 1.0, 1.0, 1e-8}}) {
            RegimeSpec s;
            s.gamma = k.gamma;
            s.c2 = fixtures::kC2;
            const VariancePair v{k.sa, k.sb};
            const auto rows = ldp_sweep(s, v, {k.eps});
            const double g = std::abs(rows[0].estimate.scaled - rows[0].target.target) / std::abs(rows[0].target.target);
            worst = std::max(worst, g);
            d += format_g(rows[0].estimate.scaled) + " ";
        }
        return at_most(worst, 0.05, "relative gaps to the limiting rates at eps = 1e-8: " + d);
    });
    return out;
}

// ---------------------------------------------------------------------------
// cli-harness

inline std::string run_to_string(const cli::RunConfig& c) {
    std::ostringstream ss;
    cli::emit(c, cli::run_compute(c), ss);
    return ss.str();
}

inline Checks cli_harness_suite() {
    const std::string S = "cli-harness";
    Checks out;
    auto error_of = [](const std::vector<std::string>& argv) -> std::string {
        try {
            cli::parse_config(argv);
        } catch (const ValidationError& e) {
            return e.what();
        }
        return "";
    };

    detail::guarded(out, S, "parse_examples", [&] {
        const auto c = cli::parse_config({"branches", "--z0", "1.0", "--tau-max", "20", "--samples", "2000"});
        const bool ok_valid = c.integer("samples") == 2000 && c.real("tau-max") == 20.0;
        const bool ok_delta = error_of({"tail", "--delta", "1.5"}).find("delta ∈ (0,1)") != std::string::npos;
        const bool ok_gamma =
            error_of({"ldp-sweep", "--gamma", "2.4", "--delta", "0.3"}).find("(5/2)(1-delta)=1.75") != std::string::npos;
        const bool ok_unknown = !error_of({"rate", "--z00", "1"}).empty();
        const double passed = ok_valid + ok_delta + ok_gamma + ok_unknown;
        return at_least(passed, 4.0, "valid, delta, gamma and unknown-key cases");
    });

    detail::guarded(out, S, "json_round_trip", [] {
        int bad = 0;
        for (const auto& sub : cli::subcommand_names()) {
            auto c = cli::resolve_config(sub, {}, {});
            const auto back = cli::resolve_config(sub, cli::parse_json_text(cli::config_to_json(c).dump()), {});
            if (back.params != c.params || back.seed != c.seed || back.format != c.format) ++bad;
        }
        return at_most(bad, 0.0, "subcommands whose config echo does not re-parse identically");
    });

    detail::guarded(out, S, "deterministic_output", [] {
        const auto c = cli::parse_config({"tail", "--method", "monte_carlo", "--n", "200000", "--workers", "3",
                                          "--format", "json"});
        return at_most(run_to_string(c) == run_to_string(c) ? 0.0 : 1.0, 0.0, "byte differences between two runs");
    });

    detail::guarded(out, S, "branches_z0_scaling", [] {
        const auto a = cli::run_branches(cli::parse_config({"branches", "--z0", "1", "--tau-max", "8", "--samples", "200"}));
        const auto b = cli::run_branches(cli::parse_config({"branches", "--z0", "2", "--tau-max", "8", "--samples", "200"}));
        const auto& ta = a.tables[0].rows;
        const auto& tb = b.tables[0].rows;
        if (ta.size() != tb.size()) return Check{"", "", false, static_cast<double>(tb.size()), static_cast<double>(ta.size()), "row counts differ"};
        double worst = 0.0;
        for (std::size_t i = 0; i < ta.size(); ++i) {
            worst = std::max(worst, std::abs(std::get<double>(tb[i][0]) / std::get<double>(ta[i][0]) - 0.25));
        }
        return at_most(worst, 1e-15, "max |tau(z0=2)/tau(z0=1) - 1/4|");
    });
    return out;
}

// ---------------------------------------------------------------------------

inline Checks run_suite(const std::string& name) {
    if (name == "implicit-curve") return implicit_curve_suite();
    if (name == "effective-dynamics") return effective_dynamics_suite();
    if (name == "spectral-pde") return spectral_pde_suite();
    if (name == "tail-probability") return tail_probability_suite();
    if (name == "cli-harness") return cli_harness_suite();
    throw ValidationError("unknown suite '" + name + "'");
}

struct VerifyResult {
    Checks checks;
    bool all_pass = true;
};

inline VerifyResult run_verify(const cli::RunConfig& c, std::ostream* progress = nullptr) {
    VerifyResult r;
    const std::string which = c.text("suite");
    for (const auto& s : suite_names()) {
        if (which != "all" && which != s) continue;
        const auto t0 = std::chrono::steady_clock::now();
        auto checks = run_suite(s);
        if (progress != nullptr) {
            const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            *progress << "suite " << s << ": " << format_g(sec) << " s\n";
        }
        r.checks.insert(r.checks.end(), checks.begin(), checks.end());
    }
    for (const auto& k : r.checks) r.all_pass = r.all_pass && k.pass;
    return r;
}

inline cli::Report verify_report(const VerifyResult& v) {
    cli::Report rep;
    cli::Table t{"checks", {"suite", "name", "pass", "measured", "threshold", "detail"}, {}};
    for (const auto& k : v.checks) t.add({k.suite, k.name, k.pass, k.measured, k.threshold, k.detail});
    rep.tables.push_back(std::move(t));
    rep.summary["status"] = v.all_pass ? "pass" : "fail";
    std::int64_t failed = 0;
    for (const auto& k : v.checks) failed += k.pass ? 0 : 1;
    rep.summary["failed"] = failed;
    rep.summary["total"] = static_cast<std::int64_t>(v.checks.size());
    return rep;
}

}  // namespace beatnls::verify
