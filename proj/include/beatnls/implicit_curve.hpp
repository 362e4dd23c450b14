#pragma once

/// @file implicit_curve.hpp
/// @brief Solution branches of y·h(2τy²) = λ, the minimal solution and the rate function.
///
/// With ξ = 2τy² the equation becomes τ(ξ) = ξ·h(ξ)²/(2λ²) = τ, where
/// h(ξ) = |cos ξ| + |sin ξ|. Roots are confined to ξ ∈ [τλ², 2τλ²].
///
/// Branch bookkeeping is done per quarter period. Quarter q covers
/// ξ ∈ [qπ/2, (q+1)π/2] and is parametrised as ξ = c_q + μ with
/// c_q = (q + 1/2)π/2 and μ ∈ [-π/4, π/4], where h = √2·cos μ. The
/// collision point μ*_q splits the quarter into a rising segment
/// (branch 2q+1) and a falling segment (branch 2q+2).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "beatnls/numeric.hpp"

namespace beatnls::curve {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kQuarter = std::numbers::pi / 2;
inline constexpr double kDefaultRootTol = 1e-12;
/// |τ - τ̃_j| below this merges the two branches born at a kink.
inline constexpr double kBirthTol = 1e-10;
/// Relative tolerance for declaring τ a collision (jump) time.
inline constexpr double kJumpTol = 1e-9;

enum class Side { left, right };

/// h(ξ) = |cos ξ| + |sin ξ|.
inline double h_eval(double xi) { return std::abs(std::cos(xi)) + std::abs(std::sin(xi)); }

/// One-sided derivative of h. At kinks kπ/2 the left limit is -1 and the right limit +1.
inline double h_deriv(double xi, Side side) {
    const double r = xi / kQuarter;
    const double k = std::round(r);
    double q;
    if (std::abs(r - k) <= 1e-12 * std::max(1.0, std::abs(r))) {
        q = side == Side::right ? k : k - 1;
    } else {
        q = std::floor(r);
    }
    const double s = xi - q * kQuarter;
    return std::cos(s) - std::sin(s);
}

inline void require_lambda(double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw ValidationError("lambda must be positive and finite");
    }
}

/// τ(ξ) = ξ·h(ξ)²/(2λ²).
inline double tau_of_xi(double xi, double lambda) {
    require_lambda(lambda);
    const double h = h_eval(xi);
    return xi * h * h / (2.0 * lambda * lambda);
}

/// Centre of quarter q, i.e. (q + 1/2)π/2.
inline double quarter_centre(std::int64_t q) { return (static_cast<double>(q) + 0.5) * kQuarter; }

/// Offset μ* ∈ (0, π/4) of the j-th collision from π(j - 1/2)/2.
///
/// Root of cos μ - 2(c + μ) sin μ with c = π(j - 1/2)/2, which is h + 2ξh' = 0
/// written in quarter-local form. Independent of λ.
inline double collision_offset(std::int64_t j, double root_tol = kDefaultRootTol) {
    if (j < 1) throw ValidationError("collision index must be >= 1");
    const double c = quarter_centre(j - 1);
    auto f = [c](double m) { return std::cos(m) - 2.0 * (c + m) * std::sin(m); };
    return bisect(f, 0.0, kPi / 4, root_tol);
}

/// ξ_j^∞, the j-th local maximum of τ(ξ).
inline double collision_xi(std::int64_t j, double root_tol = kDefaultRootTol) {
    return quarter_centre(j - 1) + collision_offset(j, root_tol);
}

/// τ_j = π(j - 1/2)/(2λ²), where the minimal solution equals λ/√2.
inline double tau_j(std::int64_t j, double lambda) {
    require_lambda(lambda);
    return quarter_centre(j - 1) / (lambda * lambda);
}

/// τ̃_j = πj/(4λ²), birth time of branches 2j and 2j+1.
inline double birth_tau(std::int64_t j, double lambda) {
    require_lambda(lambda);
    return static_cast<double>(j) * kQuarter / (2.0 * lambda * lambda);
}

struct Birth {
    std::int64_t j;
    double xi;
    double tau;
};

struct Collision {
    std::int64_t j;
    double xi;
    double offset;      ///< ξ_j^∞ - π(j - 1/2)/2
    double tau;         ///< τ_j^∞
    double tau_excess;  ///< τ_j^∞ - τ_j, evaluated without cancellation
};

/// Collision data for index j at scale λ.
inline Collision collision(std::int64_t j, double lambda, double root_tol = kDefaultRootTol) {
    require_lambda(lambda);
    const double mu = collision_offset(j, root_tol);
    const double c = quarter_centre(j - 1);
    const double l2 = lambda * lambda;
    const double cm = std::cos(mu);
    const double sm = std::sin(mu);
    // τ^∞ - τ_j = (μ cos²μ - c sin²μ)/λ²
    return {j, c + mu, mu, (c + mu) * cm * cm / l2, (mu * cm * cm - c * sm * sm) / l2};
}

struct BranchTable {
    double lambda = 1.0;
    std::int64_t max_index = 0;
    std::vector<Birth> births;
    std::vector<Collision> collisions;
};

/// Births and collisions for j = 1..max_index.
inline BranchTable build_branch_table(double lambda, std::int64_t max_index) {
    require_lambda(lambda);
    if (max_index < 1) throw ValidationError("max_index must be >= 1");
    BranchTable t;
    t.lambda = lambda;
    t.max_index = max_index;
    t.births.reserve(static_cast<std::size_t>(max_index));
    t.collisions.reserve(static_cast<std::size_t>(max_index));
    for (std::int64_t j = 1; j <= max_index; ++j) {
        t.births.push_back({j, static_cast<double>(j) * kQuarter, birth_tau(j, lambda)});
        t.collisions.push_back(collision(j, lambda));
    }
    return t;
}

/// One root of the implicit equation. A degenerate root (birth or collision)
/// carries two branch indices: `branch_index` and `partner_index`.
struct BranchValue {
    std::int64_t branch_index = 0;
    double tau = 0.0;
    double y = 0.0;
    double xi = 0.0;
    bool exists = false;
    std::int64_t partner_index = 0;  ///< 0 unless degenerate
    bool at_collision = false;
};

namespace detail {

/// g(μ) = ξ h(ξ)² - 2τλ² on quarter q in local coordinates.
struct QuarterEq {
    double c;
    double target;
    double operator()(double m) const { return (c + m) * (1.0 + std::cos(2.0 * m)) - target; }
};

/// ξ on the rising segment of quarter q. Quarter 0 is solved in ξ itself since
/// ξ = π/4 + μ loses all relative precision once ξ ≪ 1.
inline double rising_xi(const QuarterEq& g, std::int64_t q, double ms, double xtol) {
    if (q == 0) {
        const auto f = [&](double x) { return x * (1.0 + std::sin(2.0 * x)) - g.target; };
        return bisect(f, 0.0, g.c + ms, xtol);
    }
    return g.c + bisect(g, -kPi / 4, ms, xtol);
}

/// Visit roots in increasing ξ. The visitor returns false to stop.
template <class Visit>
void scan_roots(double tau, double lambda, double root_tol, Visit&& visit) {
    require_lambda(lambda);
    if (!(tau > 0.0) || !std::isfinite(tau)) throw ValidationError("tau must be positive and finite");
    const double l2 = lambda * lambda;
    const double target = 2.0 * tau * l2;
    const double jump_g = 2.0 * l2 * kJumpTol * (1.0 + tau);
    const double birth_g = 2.0 * l2 * kBirthTol;
    // y = √(ξ/2τ) amplifies ξ errors by 1/(4τy) at small τ.
    const double xtol = root_tol * std::min(1.0, target);
    const auto q_lo = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor(tau * l2 / kQuarter)) - 1);
    const auto q_hi = static_cast<std::int64_t>(std::floor(target / kQuarter)) + 1;

    auto emit = [&](std::int64_t idx, std::int64_t partner, double xi, bool coll) {
        BranchValue v;
        v.branch_index = idx;
        v.partner_index = partner;
        v.tau = tau;
        v.xi = xi;
        v.y = std::sqrt(xi / (2.0 * tau));
        v.exists = true;
        v.at_collision = coll;
        return visit(v);
    };

    for (std::int64_t q = q_lo; q <= q_hi; ++q) {
        const QuarterEq g{quarter_centre(q), target};
        const double ms = collision_offset(q + 1, root_tol);
        const double gl = q == 0 ? -target : g(-kPi / 4);
        const double gm = g(ms);
        const double gr = g(kPi / 4);
        const auto rise = 2 * q + 1;
        const auto fall = 2 * q + 2;

        if (std::abs(gm) <= jump_g) {
            if (!emit(rise, fall, g.c + ms, true)) return;
            continue;
        }
        if (gm < 0.0) continue;
        // Rising segment; a root at the left kink merges with the previous falling branch.
        if (q > 0 && std::abs(gl) <= birth_g) {
            if (!emit(2 * q, rise, static_cast<double>(q) * kQuarter, false)) return;
        } else if (gl <= 0.0) {
            if (!emit(rise, 0, rising_xi(g, q, ms, xtol), false)) return;
        }
        // Falling segment; a root at the right kink is emitted by the next quarter.
        if (gr <= 0.0 && std::abs(gr) > birth_g) {
            const double m = bisect(g, ms, kPi / 4, xtol);
            if (!emit(fall, 0, g.c + m, false)) return;
        }
    }
}

}  // namespace detail

/// All roots y ∈ [λ/√2, λ] at time τ, sorted by ξ (equivalently by y).
inline std::vector<BranchValue> enumerate_solutions(double tau, double lambda,
                                                    double root_tol = kDefaultRootTol) {
    std::vector<BranchValue> out;
    detail::scan_roots(tau, lambda, root_tol, [&](const BranchValue& v) {
        out.push_back(v);
        return true;
    });
    return out;
}

/// Value of a single branch at time τ, if alive.
inline std::optional<BranchValue> branch_value(std::int64_t branch_index, double tau, double lambda,
                                               double root_tol = kDefaultRootTol) {
    if (branch_index < 1) throw ValidationError("branch index must be >= 1");
    require_lambda(lambda);
    if (!(tau > 0.0)) throw ValidationError("tau must be positive");
    const std::int64_t q = (branch_index - 1) / 2;
    const bool rising = branch_index % 2 == 1;
    const double target = 2.0 * tau * lambda * lambda;
    const detail::QuarterEq g{quarter_centre(q), target};
    const double ms = collision_offset(q + 1, root_tol);
    const double gm = g(ms);
    const double ge = rising ? (q == 0 ? -target : g(-kPi / 4)) : g(kPi / 4);
    if (gm < 0.0 || ge > 0.0) return std::nullopt;
    const double xtol = root_tol * std::min(1.0, target);
    BranchValue v;
    v.branch_index = branch_index;
    v.tau = tau;
    v.xi = rising ? detail::rising_xi(g, q, ms, xtol) : g.c + bisect(g, ms, kPi / 4, xtol);
    v.y = std::sqrt(v.xi / (2.0 * tau));
    v.exists = true;
    return v;
}

/// Minimal solution Y(τ). Left-continuous: at τ = τ_j^∞ the dying branch is returned.
inline BranchValue minimal_solution(double tau, double lambda, double root_tol = kDefaultRootTol) {
    std::optional<BranchValue> first;
    detail::scan_roots(tau, lambda, root_tol, [&](const BranchValue& v) {
        first = v;
        return false;
    });
    if (!first) throw ComputationError("no root of the implicit equation found");
    return *first;
}

inline double minimal_solution_Y(double tau, double lambda, double root_tol = kDefaultRootTol) {
    return minimal_solution(tau, lambda, root_tol).y;
}

struct RateValue {
    double tau = 0.0;
    double J = 0.0;
    bool is_jump = false;
    std::int64_t branch_index = 0;
};

/// Rate function 𝒥(z₀, τ). Right-continuous at collisions: within the jump
/// tolerance of τ_j^∞ it returns y_{2j+1}, the branch that takes over.
inline RateValue rate_function(double z0, double tau, double root_tol = kDefaultRootTol) {
    RateValue r;
    r.tau = tau;
    bool skipped = false;
    bool done = false;
    detail::scan_roots(tau, z0, root_tol, [&](const BranchValue& v) {
        if (!skipped && v.at_collision) {
            skipped = true;
            r.is_jump = true;
            return true;
        }
        r.J = v.y;
        r.branch_index = v.branch_index;
        done = true;
        return false;
    });
    if (!done) throw ComputationError("rate function: no admissible branch");
    return r;
}

inline double rate_J(double z0, double tau, double root_tol = kDefaultRootTol) {
    return rate_function(z0, tau, root_tol).J;
}

enum class MuSign { minus, plus };

struct MuBranch {
    double mu = 0.0;
    int iterations = 0;
    double contraction = 0.0;  ///< largest observed ratio of successive increments
};

struct MuSolution {
    std::int64_t j = 0;
    double zeta = 0.0;
    double mu_minus = 0.0;
    double mu_plus = 0.0;
    int iterations_minus = 0;
    int iterations_plus = 0;
    double contraction = 0.0;
    /// ξ on branch 2j-1 (minus) and 2j (plus) for 2τλ² = πj - 3π/2 + ζ.
    double xi_minus = 0.0;
    double xi_plus = 0.0;
};

namespace detail {

/// Σ_{n≥2} (-1)^n v^{2n}/(2n)!
inline double cos_tail2(double v) {
    const double v2 = v * v;
    double term = v2 * v2 / 24.0;
    double s = 0.0;
    for (int n = 2; n < 60 && term != 0.0; ++n) {
        s += term;
        if (std::abs(term) <= 1e-18 * std::abs(s)) break;
        term *= -v2 / ((2.0 * n + 1.0) * (2.0 * n + 2.0));
    }
    return s;
}

}  // namespace detail

/// Fixed-point iteration for the offset μ of branch 2j-1 (minus) or 2j (plus)
/// from π(j - 1/2)/2 at 2τλ² = πj - 3π/2 + ζ.
///
/// With A = πj - π/2 the exact equation is (A ∓ 2μ)cos²μ = A - π + ζ for the
/// reconstruction ξ = A/2 ∓ μ. Writing cos²μ = 1 - μ² + R/D with
/// D = A ± 2v turns it into a quadratic in μ whose relevant root defines Φ±.
inline MuBranch mu_fixed_point(std::int64_t j, double zeta, MuSign sign, double tol = kDefaultRootTol,
                               int max_iter = 500) {
    if (j < 1) throw ValidationError("j must be >= 1");
    if (!(zeta >= -kPi && zeta <= kPi)) throw ValidationError("zeta must lie in [-pi, pi]");
    const double A = kPi * static_cast<double>(j) - kPi / 2;
    const double s = sign == MuSign::plus ? 1.0 : -1.0;
    auto phi = [&](double v) {
        const double D = A + 2.0 * s * v;
        if (!(D > 0.0)) throw ComputationError("mu iteration left its domain");
        const double s2 = detail::cos_tail2(v);
        const double s1 = -0.5 * v * v + s2;
        const double x = kPi - zeta + D * (s1 * s1 + 2.0 * s2);
        const double dx = D * x;
        if (dx < -1.0) throw ComputationError("mu iteration: negative discriminant");
        const double r = std::sqrt(dx + 1.0);
        return sign == MuSign::plus ? (r + 1.0) / D : x / (r + 1.0);
    };
    MuBranch b;
    double v = 0.0;
    double prev_step = 0.0;
    for (int it = 1; it <= max_iter; ++it) {
        const double nv = phi(v);
        const double step = std::abs(nv - v);
        if (prev_step > 0.0 && step > 0.0) b.contraction = std::max(b.contraction, step / prev_step);
        v = nv;
        b.iterations = it;
        if (step <= tol) {
            b.mu = v;
            return b;
        }
        prev_step = step;
    }
    throw ComputationError("mu fixed point did not converge for j=" + std::to_string(j));
}

inline MuSolution mu_solution(std::int64_t j, double zeta, double tol = kDefaultRootTol) {
    const auto m = mu_fixed_point(j, zeta, MuSign::minus, tol);
    const auto p = mu_fixed_point(j, zeta, MuSign::plus, tol);
    MuSolution s;
    s.j = j;
    s.zeta = zeta;
    s.mu_minus = m.mu;
    s.mu_plus = p.mu;
    s.iterations_minus = m.iterations;
    s.iterations_plus = p.iterations;
    s.contraction = std::max(m.contraction, p.contraction);
    const double c = quarter_centre(j - 1);
    s.xi_minus = c - m.mu;
    s.xi_plus = c + p.mu;
    return s;
}

/// Lower and upper bounds on μ∓ that hold for j ≥ j₀.
struct MuBounds {
    double minus_lo, minus_hi, plus_lo, plus_hi;
};

inline MuBounds mu_bounds(std::int64_t j, double zeta) {
    const double jd = static_cast<double>(j);
    const double hi = 4.0 / std::sqrt(jd);
    return {(kPi - zeta) / (10.0 * jd), hi, 1.0 / (kPi * jd), hi};
}

/// The four smallest roots, expanded so that a degenerate root counts twice.
inline std::vector<BranchValue> smallest_roots(double tau, double lambda, std::size_t count,
                                               double root_tol = kDefaultRootTol) {
    std::vector<BranchValue> out;
    detail::scan_roots(tau, lambda, root_tol, [&](const BranchValue& v) {
        out.push_back(v);
        if (v.partner_index != 0) {
            BranchValue w = v;
            w.branch_index = v.partner_index;
            w.partner_index = v.branch_index;
            out.push_back(w);
        }
        return out.size() < count;
    });
    if (out.size() > count) out.resize(count);
    return out;
}

struct GapCheck {
    std::int64_t j = 0;
    double gap_sum = 0.0;  ///< (y_{2j} - y_{2j-1}) + (y_{2j+2} - y_{2j+1})
    double bound = 0.0;    ///< c/(λ³τ²)
    bool pass = false;
};

/// gap_sum without the index restriction; used for calibration.
inline GapCheck branch_gap_sum(double tau, double lambda) {
    const auto r = smallest_roots(tau, lambda, 4);
    if (r.size() < 4) throw ComputationError("fewer than four branches alive");
    if (r[0].branch_index % 2 != 1) throw ComputationError("minimal root is not on an odd branch");
    for (std::size_t i = 1; i < 4; ++i) {
        if (r[i].branch_index != r[0].branch_index + static_cast<std::int64_t>(i)) {
            throw ComputationError("branch indices are not consecutive");
        }
    }
    GapCheck g;
    g.j = (r[0].branch_index + 1) / 2;
    g.gap_sum = (r[1].y - r[0].y) + (r[3].y - r[2].y);
    return g;
}

/// Lower bound on the sum of the two smallest branch gaps. `gap_constant`
/// is the calibrated constant c in c/(λ³τ²); `j0` guards the index range.
inline GapCheck branch_gap_lower_bound_check(double tau, double lambda, double gap_constant,
                                             std::int64_t j0) {
    GapCheck g = branch_gap_sum(tau, lambda);
    if (g.j < j0) {
        throw ValidationError("gap bound requires j >= " + std::to_string(j0) + ", got " +
                              std::to_string(g.j));
    }
    g.bound = gap_constant / (lambda * lambda * lambda * tau * tau);
    g.pass = g.gap_sum >= g.bound;
    return g;
}

/// Sample ζ uniformly on [-π, π] with `n` points (endpoints included).
inline std::vector<double> zeta_grid(int n) {
    if (n < 2) throw ValidationError("zeta grid needs at least 2 points");
    std::vector<double> z(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) z[static_cast<std::size_t>(i)] = -kPi + 2.0 * kPi * i / (n - 1);
    return z;
}

struct MuCheck {
    bool converged = true;
    bool bounds_ok = true;
    double max_contraction = 0.0;
};

/// Fixed-point convergence and bound checks over a ζ grid at a single j.
inline MuCheck mu_check(std::int64_t j, int zeta_points, double contraction_limit) {
    MuCheck c;
    for (double z : zeta_grid(zeta_points)) {
        try {
            const auto s = mu_solution(j, z);
            const auto b = mu_bounds(j, z);
            c.max_contraction = std::max(c.max_contraction, s.contraction);
            if (s.contraction >= contraction_limit) c.converged = false;
            if (s.mu_minus < b.minus_lo - 1e-15 || s.mu_minus > b.minus_hi || s.mu_plus < b.plus_lo ||
                s.mu_plus > b.plus_hi) {
                c.bounds_ok = false;
            }
            // Both roots must stay inside quarter j-1.
            if (s.mu_plus > kPi / 4 || s.mu_minus > kPi / 4) c.bounds_ok = false;
        } catch (const ComputationError&) {
            c.converged = false;
        }
    }
    return c;
}

/// Smallest j ≥ 2 from which the fixed-point map contracts (ratio below
/// `contraction_limit`) and the μ bounds hold at every ζ, for `stable_span`
/// consecutive indices.
inline std::int64_t empirical_j0(int zeta_points = 33, double contraction_limit = 0.9,
                                 std::int64_t stable_span = 50, std::int64_t j_search_max = 10000) {
    std::int64_t run_start = -1;
    for (std::int64_t j = 2; j <= j_search_max; ++j) {
        const auto c = mu_check(j, zeta_points, contraction_limit);
        if (c.converged && c.bounds_ok) {
            if (run_start < 0) run_start = j;
            if (j - run_start + 1 >= stable_span) return run_start;
        } else {
            run_start = -1;
        }
    }
    throw ComputationError("empirical j0 not found");
}

/// Half the minimum of gap_sum·λ³τ² over τ ∈ (τ_{j-1}^∞, τ_j^∞], j ∈ [j0, j_max].
inline double calibrate_gap_constant(std::int64_t j0, std::int64_t j_max, int samples_per_j = 16) {
    double mn = std::numeric_limits<double>::infinity();
    for (std::int64_t j = std::max<std::int64_t>(j0, 2); j <= j_max; ++j) {
        const double a = collision(j - 1, 1.0).tau;
        const double b = collision(j, 1.0).tau;
        for (int k = 1; k <= samples_per_j; ++k) {
            const double t = a + (b - a) * k / samples_per_j;
            const auto g = branch_gap_sum(t, 1.0);
            mn = std::min(mn, g.gap_sum * t * t);
        }
    }
    return 0.5 * mn;
}

/// max of j·(y_{2j+1}(τ) - λ/√2)/λ over τ ∈ [τ_{j-1}, τ_{j+1}], j ∈ [j0, j_max].
inline double calibrate_minimal_constant(std::int64_t j0, std::int64_t j_max, int samples_per_j = 16) {
    double mx = 0.0;
    for (std::int64_t j = std::max<std::int64_t>(j0, 3); j <= j_max; ++j) {
        const double a = tau_j(j - 1, 1.0);
        const double b = tau_j(j + 1, 1.0);
        for (int k = 0; k <= samples_per_j; ++k) {
            const double t = a + (b - a) * k / samples_per_j;
            const auto v = branch_value(2 * j + 1, t, 1.0);
            if (!v) throw ComputationError("branch 2j+1 not alive in calibration window");
            mx = std::max(mx, static_cast<double>(j) * (v->y - std::numbers::sqrt2 / 2));
        }
    }
    return mx;
}

}  // namespace beatnls::curve
