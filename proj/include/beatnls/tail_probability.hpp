#pragma once

/// @file tail_probability.hpp
/// @brief Gaussian tail formulas, the sup-norm event region and its log-probability.
///
/// After rescaling (a, b) = ε^δ(|α|, |β|), the event
/// sup_x|u(t,x)| ≥ z₀ε^{1-δ} becomes (a, b) ∈ 𝒜(τ, λ) with τ = ε^{2(1-δ)}t.
/// Under the rescaling a and b are independent Rayleigh variables with
/// E a² = σa²ε^{2δ} and E b² = σb²ε^{2δ}.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "beatnls/effective_dynamics.hpp"
#include "beatnls/implicit_curve.hpp"
#include "beatnls/numeric.hpp"
#include "beatnls/rng.hpp"

namespace beatnls::tail {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct VariancePair {
    double sigma_a2 = 2.0;
    double sigma_b2 = 1.0;
};

inline void validate(const VariancePair& v) {
    if (!(v.sigma_a2 > 0.0) || !(v.sigma_b2 > 0.0) || !std::isfinite(v.sigma_a2) || !std::isfinite(v.sigma_b2)) {
        throw ValidationError("variances must be positive and finite");
    }
}

inline bool equal_variance(const VariancePair& v) {
    return std::abs(v.sigma_a2 - v.sigma_b2) <= 1e-12 * std::max(v.sigma_a2, v.sigma_b2);
}

// ---------------------------------------------------------------------------
// Closed-form tails

/// log P(|α| + |β| > z).
///
/// Splitting on |α| ≤ z and completing the square gives
/// P = e^{-z²/(σa²+σb²)}·I + e^{-z²/σa²}, with
/// I = ∫₀^z (2a/σa²) exp(-(S a - zσa²)²/(S σa²σb²)) da and S = σa² + σb².
inline double log_l1_tail(double z, const VariancePair& v) {
    validate(v);
    if (!(z > 0.0)) throw ValidationError("z must be positive");
    const double sa = v.sigma_a2;
    const double sb = v.sigma_b2;
    const double S = sa + sb;
    const double m = z * sa / S;
    const double kappa = S / (sa * sb);
    auto f = [&](double a) { return (2.0 * a / sa) * std::exp(-kappa * (a - m) * (a - m)); };
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    // The integrand is a narrow bump around m for large z; split there.
    const double w = 8.0 / std::sqrt(kappa);
    std::vector<double> cuts{0.0};
    for (double p : {m - w, m, m + w}) {
        if (p > cuts.back() && p < z) cuts.push_back(p);
    }
    cuts.push_back(z);
    double I = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        I += GK::integrate(f, cuts[i], cuts[i + 1], 15, 1e-14);
    }
    return log_add(-z * z / S + std::log(I), -z * z / sa);
}

inline double l1_tail(double z, const VariancePair& v) { return std::exp(log_l1_tail(z, v)); }

/// log P(√2·√(|α|² + |β|²) > z).
///
/// Equal variances: (z²/(2σ²) + 1)e^{-z²/(2σ²)}. Otherwise
/// [σa²e^{-z²/(2σa²)} - σb²e^{-z²/(2σb²)}]/(σa² - σb²), which is the divided
/// difference of f(s) = s·e^{-w/s} (w = z²/2). Below a relative gap of 1e-2 the
/// divided difference is evaluated as the mean of f'(s) = e^{-w/s}(1 + w/s)
/// over [σb², σa²] with 10-point Gauss-Legendre, which is exact to rounding
/// there and continuous with both closed forms.
inline double log_l2_tail(double z, const VariancePair& v) {
    validate(v);
    if (!(z > 0.0)) throw ValidationError("z must be positive");
    const double w = 0.5 * z * z;
    const double sa = v.sigma_a2;
    const double sb = v.sigma_b2;
    const double gap = std::abs(sa - sb) / std::max(sa, sb);
    if (gap == 0.0) return -w / sa + std::log1p(w / sa);
    if (gap < 1e-2) {
        // log of mean of f' with the exponential factored out at the larger variance.
        const double hi = std::max(sa, sb);
        const double lo = std::min(sa, sb);
        auto g = [&](double s) { return std::exp(-w / s + w / hi) * (1.0 + w / s); };
        const double mean = boost::math::quadrature::gauss<double, 10>::integrate(g, lo, hi) / (hi - lo);
        return -w / hi + std::log(mean);
    }
    const double hi = std::max(sa, sb);
    const double lo = std::min(sa, sb);
    // hi·e^{-w/hi} - lo·e^{-w/lo} = hi·e^{-w/hi}(1 - (lo/hi)e^{-w(1/lo - 1/hi)})
    const double r = std::log(lo / hi) - w * (1.0 / lo - 1.0 / hi);
    return std::log(hi) - w / hi + log1mexp(r) - std::log(hi - lo);
}

inline double l2_tail(double z, const VariancePair& v) { return std::exp(log_l2_tail(z, v)); }

// ---------------------------------------------------------------------------
// Regions

/// Membership in 𝒜(τ, λ): a + b ≤ 2c and
/// √(a²cos²θ + b²sin²θ) + √(b²cos²θ + a²sin²θ) ≥ λ with θ = 2τ(a² + b²).
inline bool region_A_member(double a, double b, double tau, double lambda, double cutoff_c) {
    if (a + b > 2.0 * cutoff_c) return false;
    const double th = 2.0 * tau * (a * a + b * b);
    const double c2 = std::cos(th) * std::cos(th);
    const double s2 = 1.0 - c2;
    return std::sqrt(a * a * c2 + b * b * s2) + std::sqrt(b * b * c2 + a * a * s2) >= lambda;
}

/// Membership in 𝓑(τ, λ̃) = {a ∈ [0, c] : a·h(2τa²) ≥ λ̃} × [0, ε].
inline bool region_B_member(double a, double b, double tau, double lambda_tilde, double eps, double cutoff_c) {
    if (a < 0.0 || a > cutoff_c || b < 0.0 || b > eps) return false;
    return a * curve::h_eval(2.0 * tau * a * a) >= lambda_tilde;
}

/// Sign convention for the shifted level λ̃ of the inclusion 𝓑(τ, λ̃) ⊂ 𝒜(τ, λ).
enum class InclusionShift {
    raised,  ///< λ̃ = λ + C₁√τ·ε + √ε, for which the inclusion holds
    lowered  ///< λ̃ = λ - C₁√τ·ε - √ε, which admits counterexamples at b = 0
};

inline double inclusion_level(double lambda, double tau, double eps, double c1, InclusionShift s) {
    const double d = c1 * std::sqrt(tau) * eps + std::sqrt(eps);
    return s == InclusionShift::raised ? lambda + d : lambda - d;
}

struct InclusionCheck {
    std::int64_t samples = 0;
    std::int64_t violations = 0;
    double worst_a = kNaN;  ///< a-coordinate of one violating sample, if any
    double worst_b = kNaN;
};

/// Samples 𝓑(τ, λ̃) and counts points outside 𝒜(τ, λ).
///
/// Half the samples are uniform on 𝓑; the other half are uniform on
/// 𝓑 ∩ {a ≤ 2λ̃}, where the boundaries of the two sets are closest.
inline InclusionCheck inclusion_check(double tau, double eps, double lambda, double c1, double cutoff_c,
                                      std::int64_t n, std::uint64_t seed,
                                      InclusionShift shift = InclusionShift::raised) {
    if (!(tau > 0.0) || !(eps > 0.0) || !(lambda > 0.0) || n < 1) {
        throw ValidationError("inclusion_check: tau, eps, lambda and n must be positive");
    }
    const double lt = inclusion_level(lambda, tau, eps, c1, shift);
    if (!(lt > 0.0)) throw ValidationError("shifted level must stay positive");
    const double a_lo = lt / std::numbers::sqrt2;
    const CounterRng rng(seed, 0xC1A1);
    InclusionCheck r;
    std::uint64_t ctr = 0;
    for (std::int64_t i = 0; i < n; ++i) {
        const double a_hi = (i % 2 == 0) ? cutoff_c : std::min(cutoff_c, 2.0 * lt);
        if (!(a_hi > a_lo)) throw ValidationError("cutoff too small for the shifted level");
        double a = 0.0;
        double b = 0.0;
        for (int tries = 0;; ++tries) {
            if (tries > 100000) throw ComputationError("inclusion_check: rejection sampler stalled");
            a = a_lo + (a_hi - a_lo) * rng.uniform(ctr++);
            b = eps * rng.uniform(ctr++);
            if (region_B_member(a, b, tau, lt, eps, cutoff_c)) break;
        }
        ++r.samples;
        if (!region_A_member(a, b, tau, lambda, cutoff_c)) {
            if (r.violations == 0) {
                r.worst_a = a;
                r.worst_b = b;
            }
            ++r.violations;
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// Regimes

struct RegimeSpec {
    double z0 = 1.0;
    double delta = 0.3;
    double gamma = 0.0;
    double c_time = 1.0;    ///< t = c_time·ε^{-γ}
    double cutoff_c = 10.0;
    double c2 = 0.0;        ///< λ = z₀ - c2·ε^{(1-δ)/2}
};

inline void validate(const RegimeSpec& s) {
    if (!(s.z0 > 0.0) || !std::isfinite(s.z0)) throw ValidationError("z0 must be positive");
    if (!(s.delta > 0.0 && s.delta < 1.0)) {
        throw ValidationError("delta ∈ (0,1) violated: delta = " + format_g(s.delta));
    }
    const double gmax = 2.5 * (1.0 - s.delta);
    if (!(s.gamma >= 0.0 && s.gamma < gmax)) {
        throw ValidationError("0 <= gamma < (5/2)(1-delta) violated: gamma = " + format_g(s.gamma) +
                              ", (5/2)(1-delta)=" + format_g(gmax));
    }
    if (!(s.c_time > 0.0)) throw ValidationError("c_time must be positive");
    if (!(s.cutoff_c >= 10.0 * s.z0)) throw ValidationError("cutoff_c must be at least 10*z0");
    if (!(s.c2 >= 0.0) || !std::isfinite(s.c2)) throw ValidationError("c2 must be >= 0");
}

enum class Regime { sub_resonant, resonant, super_resonant, equal_variance };

inline std::string regime_label(Regime r) {
    switch (r) {
        case Regime::sub_resonant: return "sub-resonant";
        case Regime::resonant: return "resonant";
        case Regime::super_resonant: return "super-resonant";
        case Regime::equal_variance: return "equal-variance";
    }
    return "unknown";
}

inline bool is_resonant_exponent(const RegimeSpec& s) {
    return std::abs(s.gamma - 2.0 * (1.0 - s.delta)) <= 1e-12;
}

inline Regime classify(const RegimeSpec& s, const VariancePair& v) {
    if (equal_variance(v)) return Regime::equal_variance;
    if (is_resonant_exponent(s)) return Regime::resonant;
    return s.gamma < 2.0 * (1.0 - s.delta) ? Regime::sub_resonant : Regime::super_resonant;
}

/// Rescaled time τ = ε^{2(1-δ)}·c_time·ε^{-γ}.
inline double rescaled_tau(const RegimeSpec& s, double eps) {
    return s.c_time * std::pow(eps, 2.0 * (1.0 - s.delta) - s.gamma);
}

/// Threshold λ = z₀ - c2·ε^{(1-δ)/2}.
inline double threshold_lambda(const RegimeSpec& s, double eps) {
    return s.z0 - s.c2 * std::pow(eps, 0.5 * (1.0 - s.delta));
}

struct RateTarget {
    Regime regime;
    double target = kNaN;  ///< limiting rate; NaN in the resonant window
    double lower = kNaN;   ///< resonant window: -𝒥(z₀, τ)²/σa²
    double upper = kNaN;   ///< resonant window: -z₀²/(2σa²)
};

inline RateTarget rate_target(const RegimeSpec& s, const VariancePair& v) {
    validate(s);
    validate(v);
    const double smax = std::max(v.sigma_a2, v.sigma_b2);
    const double z2 = s.z0 * s.z0;
    RateTarget t{classify(s, v)};
    switch (t.regime) {
        case Regime::equal_variance: t.target = -z2 / (2.0 * v.sigma_a2); break;
        case Regime::sub_resonant: t.target = -z2 / (v.sigma_a2 + v.sigma_b2); break;
        case Regime::super_resonant: t.target = -z2 / (2.0 * smax); break;
        case Regime::resonant: {
            const double J = curve::rate_J(s.z0, s.c_time);
            t.lower = -J * J / smax;
            t.upper = -z2 / (2.0 * smax);
            break;
        }
    }
    return t;
}

enum class Method { quadrature, monte_carlo, closed_form };

inline std::string method_label(Method m) {
    switch (m) {
        case Method::quadrature: return "quadrature";
        case Method::monte_carlo: return "monte_carlo";
        case Method::closed_form: return "closed_form";
    }
    return "unknown";
}

struct TailEstimate {
    double eps = 0.0;
    double tau = 0.0;
    double lambda = 0.0;
    double log_p = kNaN;
    double scaled = kNaN;
    Method method = Method::quadrature;
    double err = 0.0;
    double theta = 0.0;  ///< importance-sampling tilt (Monte Carlo only)
};

// ---------------------------------------------------------------------------
// Quadrature

struct QuadratureGrid {
    int cells_a = 2048;
    int cells_b = 512;
    int refine_levels = 4;
};

namespace detail {

/// log P(x0 ≤ R ≤ x1) for a Rayleigh modulus with E R² = v.
inline double log_cell_mass(double x0, double x1, double v) {
    return -x0 * x0 / v + log1mexp(-(x1 * x1 - x0 * x0) / v);
}

struct Integrand {
    double tau, lambda, cutoff, va, vb;
    [[nodiscard]] bool member(double a, double b) const { return region_A_member(a, b, tau, lambda, cutoff); }
};

/// Log-mass of 𝒜 inside [a0,a1]×[b0,b1], bisecting while corners disagree.
inline void refine(const Integrand& f, double a0, double a1, double b0, double b1, int level, LogSumExp& acc) {
    const bool c00 = f.member(a0, b0);
    const bool c10 = f.member(a1, b0);
    const bool c01 = f.member(a0, b1);
    const bool c11 = f.member(a1, b1);
    const int n = c00 + c10 + c01 + c11;
    const double lm = log_cell_mass(a0, a1, f.va) + log_cell_mass(b0, b1, f.vb);
    if (n == 4) {
        acc.add(lm);
        return;
    }
    if (n == 0 && level > 0) return;
    if (level == 0) {
        if (f.member(0.5 * (a0 + a1), 0.5 * (b0 + b1))) acc.add(lm);
        return;
    }
    const double am = 0.5 * (a0 + a1);
    const double bm = 0.5 * (b0 + b1);
    refine(f, a0, am, b0, bm, level - 1, acc);
    refine(f, am, a1, b0, bm, level - 1, acc);
    refine(f, a0, am, bm, b1, level - 1, acc);
    refine(f, am, a1, bm, b1, level - 1, acc);
}

}  // namespace detail

/// log P((a, b) ∈ 𝒜(τ, λ)) on a tensor grid over [0, 2c]², with exact
/// Rayleigh mass per cell and refinement of cells whose corners disagree.
///
/// `err` is the change in log_p between the last two refinement levels.
/// Throws ComputationError when no cell is a member or when the heaviest
/// member cell touches the outer edge of the grid.
inline TailEstimate log_tail_quadrature(const RegimeSpec& spec, const VariancePair& var, double eps,
                                        const QuadratureGrid& grid = {}) {
    validate(spec);
    validate(var);
    if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("eps must lie in (0, 1)");
    if (grid.cells_a < 2 || grid.cells_b < 2 || grid.refine_levels < 1) throw ValidationError("bad quadrature grid");
    TailEstimate est;
    est.eps = eps;
    est.method = Method::quadrature;
    est.tau = rescaled_tau(spec, eps);
    est.lambda = threshold_lambda(spec, eps);
    if (!(est.lambda > 0.0)) throw ValidationError("eps too large: the corrected threshold is not positive");
    const double scale = std::pow(eps, 2.0 * spec.delta);
    const detail::Integrand f{est.tau, est.lambda, spec.cutoff_c, var.sigma_a2 * scale, var.sigma_b2 * scale};

    const int na = grid.cells_a;
    const int nb = grid.cells_b;
    const double L = 2.0 * spec.cutoff_c;
    const double ha = L / na;
    const double hb = L / nb;
    std::vector<double> la(static_cast<std::size_t>(na));
    std::vector<double> lb(static_cast<std::size_t>(nb));
    for (int i = 0; i < na; ++i) la[static_cast<std::size_t>(i)] = detail::log_cell_mass(i * ha, (i + 1) * ha, f.va);
    for (int j = 0; j < nb; ++j) lb[static_cast<std::size_t>(j)] = detail::log_cell_mass(j * hb, (j + 1) * hb, f.vb);

    // Node membership, row-major in b.
    const auto na1 = static_cast<std::size_t>(na + 1);
    std::vector<unsigned char> node(na1 * static_cast<std::size_t>(nb + 1));
    for (int j = 0; j <= nb; ++j) {
        for (int i = 0; i <= na; ++i) node[static_cast<std::size_t>(j) * na1 + static_cast<std::size_t>(i)] = f.member(i * ha, j * hb);
    }
    auto at = [&](int i, int j) { return node[static_cast<std::size_t>(j) * na1 + static_cast<std::size_t>(i)] != 0; };

    LogSumExp fine;
    LogSumExp coarse;
    double best = kNegInf;
    int best_i = -1;
    int best_j = -1;
    for (int j = 0; j < nb; ++j) {
        for (int i = 0; i < na; ++i) {
            const int n = at(i, j) + at(i + 1, j) + at(i, j + 1) + at(i + 1, j + 1);
            if (n == 0) continue;
            const double lm = la[static_cast<std::size_t>(i)] + lb[static_cast<std::size_t>(j)];
            if (n == 4) {
                fine.add(lm);
                coarse.add(lm);
            } else {
                detail::refine(f, i * ha, (i + 1) * ha, j * hb, (j + 1) * hb, grid.refine_levels, fine);
                detail::refine(f, i * ha, (i + 1) * ha, j * hb, (j + 1) * hb, grid.refine_levels - 1, coarse);
            }
            if (lm > best) {
                best = lm;
                best_i = i;
                best_j = j;
            }
        }
    }
    if (fine.empty()) throw ComputationError("quadrature: no grid cell lies in the event region");
    const bool on_edge = best_i == na - 1 || best_j == nb - 1 ||
                         (best_i + 2) * ha + (best_j + 2) * hb >= 2.0 * spec.cutoff_c;
    if (on_edge) {
        throw ComputationError("quadrature: dominant cell lies on the outer edge of the grid; enlarge cutoff_c");
    }
    est.log_p = std::min(0.0, fine.value());
    est.err = std::abs(fine.value() - coarse.value());
    est.scaled = scale * est.log_p;
    return est;
}

// ---------------------------------------------------------------------------
// Monte Carlo

/// Importance-sampling tilt: variances are inflated by 1/(1-θ) so that the
/// squared radius λ²/2 of the nearest event point becomes typical,
/// θ = 1 - v_max/(λ²/2) clamped to [0, 0.9].
inline double default_tilt(double lambda, double v_max) {
    if (!(lambda > 0.0)) return 0.0;
    return std::clamp(1.0 - v_max / (0.5 * lambda * lambda), 0.0, 0.9);
}

struct MonteCarloOptions {
    std::int64_t n = 1000000;
    std::uint64_t seed = kDefaultSeed;
    int workers = 1;
    double theta = kNaN;  ///< NaN selects default_tilt
};

/// Importance-sampled log P((a, b) ∈ 𝒜(τ, λ)).
///
/// Samples are split into `workers` contiguous blocks, each on its own
/// stream; block sums are pairwise and combined in block order, so the
/// result is bit-identical for a fixed worker count.
inline TailEstimate log_tail_monte_carlo(const RegimeSpec& spec, const VariancePair& var, double eps,
                                         const MonteCarloOptions& opt = {}) {
    validate(spec);
    validate(var);
    if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("eps must lie in (0, 1)");
    if (opt.n < 10000) throw ValidationError("Monte Carlo needs n >= 10000");
    if (opt.workers < 1) throw ValidationError("workers must be >= 1");
    TailEstimate est;
    est.eps = eps;
    est.method = Method::monte_carlo;
    est.tau = rescaled_tau(spec, eps);
    est.lambda = threshold_lambda(spec, eps);
    if (!(est.lambda > 0.0)) throw ValidationError("eps too large: the corrected threshold is not positive");
    const double scale = std::pow(eps, 2.0 * spec.delta);
    const double va = var.sigma_a2 * scale;
    const double vb = var.sigma_b2 * scale;
    const double theta = std::isnan(opt.theta) ? default_tilt(est.lambda, std::max(va, vb)) : opt.theta;
    if (!(theta >= 0.0 && theta < 1.0)) throw ValidationError("theta must lie in [0, 1)");
    est.theta = theta;
    const double inflate = 1.0 / (1.0 - theta);

    const auto W = static_cast<std::int64_t>(opt.workers);
    std::vector<double> s1(static_cast<std::size_t>(W));
    std::vector<double> s2(static_cast<std::size_t>(W));
    std::vector<std::int64_t> hits(static_cast<std::size_t>(W));
    auto work = [&](std::int64_t w) {
        const std::int64_t begin = opt.n * w / W;
        const std::int64_t end = opt.n * (w + 1) / W;
        const CounterRng rng(opt.seed, static_cast<std::uint64_t>(w));
        std::vector<double> x;
        std::vector<double> x2;
        x.reserve(static_cast<std::size_t>(end - begin));
        x2.reserve(static_cast<std::size_t>(end - begin));
        std::int64_t h = 0;
        for (std::int64_t i = 0; i < end - begin; ++i) {
            const auto c = static_cast<std::uint64_t>(2 * i);
            const double a = rng.rayleigh(c, va * inflate);
            const double b = rng.rayleigh(c + 1, vb * inflate);
            if (!region_A_member(a, b, est.tau, est.lambda, spec.cutoff_c)) continue;
            const double lw = 2.0 * std::log(inflate) - theta * (a * a / va + b * b / vb);
            const double wgt = std::exp(lw);
            x.push_back(wgt);
            x2.push_back(wgt * wgt);
            ++h;
        }
        s1[static_cast<std::size_t>(w)] = pairwise_sum(x);
        s2[static_cast<std::size_t>(w)] = pairwise_sum(x2);
        hits[static_cast<std::size_t>(w)] = h;
    };
    if (W == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (std::int64_t w = 0; w < W; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }
    std::int64_t total_hits = 0;
    for (auto h : hits) total_hits += h;
    if (total_hits == 0) throw ComputationError("Monte Carlo: no sample landed in the event region");
    const double n = static_cast<double>(opt.n);
    const double mean = pairwise_sum(s1) / n;
    const double m2 = pairwise_sum(s2) / n;
    const double var_hat = std::max(0.0, m2 - mean * mean);
    const double se = std::sqrt(var_hat / n);
    est.log_p = std::log(mean);
    est.err = se / mean;
    est.scaled = scale * est.log_p;
    return est;
}

/// Plain Monte Carlo of the sup-norm event using the effective solution:
/// draws complex α, β, evaluates the phase-blind sup formula at t = c_time·ε^{-γ}
/// and tests it against λε^{1-δ}, together with the cutoff |α| + |β| ≤ 2cε^{-δ}.
inline TailEstimate log_tail_direct_sampling(const RegimeSpec& spec, const VariancePair& var, double eps,
                                             std::int64_t n, std::uint64_t seed) {
    validate(spec);
    validate(var);
    if (n < 1) throw ValidationError("n must be positive");
    TailEstimate est;
    est.eps = eps;
    est.method = Method::monte_carlo;
    est.tau = rescaled_tau(spec, eps);
    est.lambda = threshold_lambda(spec, eps);
    const double t = spec.c_time * std::pow(eps, -spec.gamma);
    const double level = est.lambda * std::pow(eps, 1.0 - spec.delta);
    const double cut = 2.0 * spec.cutoff_c * std::pow(eps, -spec.delta);
    const CounterRng rng(seed, 0xD1EC7);
    std::int64_t hits = 0;
    for (std::int64_t i = 0; i < n; ++i) {
        const auto c = static_cast<std::uint64_t>(2 * i);
        dyn::InitialData d{rng.complex_gaussian(c, var.sigma_a2), rng.complex_gaussian(c + 1, var.sigma_b2), eps};
        if (std::abs(d.alpha) + std::abs(d.beta) > cut) continue;
        if (dyn::sup_norm_effective(d, t, dyn::SupMode::paper) >= level) ++hits;
    }
    if (hits == 0) throw ComputationError("direct sampling: no sample landed in the event region");
    const double p = static_cast<double>(hits) / static_cast<double>(n);
    est.log_p = std::log(p);
    est.err = std::sqrt(p * (1.0 - p) / static_cast<double>(n)) / p;
    est.scaled = std::pow(eps, 2.0 * spec.delta) * est.log_p;
    return est;
}

// ---------------------------------------------------------------------------
// Sweeps

struct LdpRow {
    TailEstimate estimate;
    RateTarget target;
    double gamma = 0.0;
    double delta = 0.0;
    double z0 = 0.0;
    VariancePair var;
};

/// Scaled log-probability along a decreasing list of ε, with the applicable rate.
inline std::vector<LdpRow> ldp_sweep(const RegimeSpec& spec, const VariancePair& var,
                                     const std::vector<double>& eps_list, Method method = Method::quadrature,
                                     const QuadratureGrid& grid = {}, const MonteCarloOptions& mc = {}) {
    validate(spec);
    validate(var);
    if (eps_list.empty()) throw ValidationError("eps list is empty");
    for (std::size_t i = 1; i < eps_list.size(); ++i) {
        if (!(eps_list[i] < eps_list[i - 1])) throw ValidationError("eps list must be strictly decreasing");
    }
    const RateTarget target = rate_target(spec, var);
    std::vector<LdpRow> rows;
    for (double e : eps_list) {
        TailEstimate est;
        switch (method) {
            case Method::quadrature: est = log_tail_quadrature(spec, var, e, grid); break;
            case Method::monte_carlo: est = log_tail_monte_carlo(spec, var, e, mc); break;
            case Method::closed_form: throw ValidationError("ldp_sweep supports quadrature and monte_carlo only");
        }
        rows.push_back({est, target, spec.gamma, spec.delta, spec.z0, var});
    }
    return rows;
}

}  // namespace beatnls::tail
