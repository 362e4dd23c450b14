#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "beatnls/fixtures.hpp"
#include "beatnls/implicit_curve.hpp"

namespace curve = beatnls::curve;
using beatnls::ComputationError;
using beatnls::ValidationError;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = std::numbers::sqrt2;

/// Roots of ξh(ξ)² = 2τλ² on [lo, hi] found by a plain sign scan plus bisection.
std::vector<double> scan_xi(double tau, double lambda, double lo, double hi, double step) {
    auto g = [&](double x) { return x * std::pow(curve::h_eval(x), 2) - 2.0 * tau * lambda * lambda; };
    std::vector<double> roots;
    double a = lo;
    double ga = g(a);
    while (a < hi) {
        const double b = std::min(hi, a + step);
        const double gb = g(b);
        if (ga == 0.0) {
            roots.push_back(a);
        } else if ((ga < 0) != (gb < 0) && gb != 0.0) {
            double l = a, r = b, gl = ga;
            for (int i = 0; i < 80; ++i) {
                const double m = 0.5 * (l + r);
                const double gm = g(m);
                if ((gm < 0) == (gl < 0)) { l = m; gl = gm; } else { r = m; }
            }
            roots.push_back(0.5 * (l + r));
        }
        a = b;
        ga = gb;
    }
    return roots;
}

}  // namespace

TEST(HEval, ExamplesAndRange) {
    EXPECT_DOUBLE_EQ(curve::h_eval(0.0), 1.0);
    EXPECT_NEAR(curve::h_eval(kPi / 4), kSqrt2, 1e-15);
    EXPECT_NEAR(curve::h_eval(kPi / 2), 1.0, 1e-15);
    for (int i = 0; i < 2000; ++i) {
        const double x = -50.0 + 0.0517 * i;
        const double v = curve::h_eval(x);
        EXPECT_GE(v, 1.0 - 1e-15);
        EXPECT_LE(v, kSqrt2 + 1e-15);
        EXPECT_NEAR(curve::h_eval(x + kPi / 2), v, 1e-13);
    }
}

TEST(HDeriv, OneSidedValues) {
    using curve::Side;
    EXPECT_NEAR(curve::h_deriv(kPi / 4, Side::right), 0.0, 1e-15);
    EXPECT_NEAR(curve::h_deriv(kPi / 2, Side::right), 1.0, 1e-15);
    EXPECT_NEAR(curve::h_deriv(kPi / 2, Side::left), -1.0, 1e-15);
    const double x = 3 * kPi / 8;
    const double fd = (curve::h_eval(x + 1e-7) - curve::h_eval(x - 1e-7)) / 2e-7;
    EXPECT_NEAR(curve::h_deriv(x, Side::right), -0.54119610014619698, 1e-12);
    EXPECT_NEAR(curve::h_deriv(x, Side::left), fd, 1e-7);
}

TEST(TauOfXi, Examples) {
    EXPECT_NEAR(curve::tau_of_xi(kPi / 2, 1.0), kPi / 4, 1e-15);
    EXPECT_NEAR(curve::tau_of_xi(kPi / 4, 1.0), kPi / 4, 1e-15);
    EXPECT_NEAR(curve::tau_of_xi(kPi, 2.0), kPi / 8, 1e-15);
}

TEST(CollisionXi, FirstRootMatchesHighPrecisionOracle) {
    // 40-digit root of h + 2ξh' on (π/4, π/2).
    EXPECT_NEAR(curve::collision_xi(1), 1.1847503659236949, 1e-11);
    const auto c = curve::collision(1, 1.0);
    EXPECT_NEAR(c.tau, 1.0056371560750097, 1e-11);
}

TEST(CollisionXi, SandwichAtLargeIndex) {
    const std::int64_t j = 10000;
    const double off = curve::collision_xi(j) - kPi * (j - 0.5) / 2;
    EXPECT_GT(off, 2.25e-5);
    EXPECT_LT(off, 4.51e-5);
    EXPECT_NEAR(off, 3.1832580172126568e-5, 1e-9);
    for (std::int64_t k = beatnls::fixtures::kJ0; k <= 2000; ++k) {
        const double o = curve::collision(k, 1.0).offset;
        ASSERT_GE(o, 1.0 / (kSqrt2 * kPi * k)) << k;
        ASSERT_LE(o, kSqrt2 / (kPi * (k - 0.5))) << k;
    }
}

TEST(BranchTable, BirthsAndCollisions) {
    const auto t = curve::build_branch_table(1.0, 3);
    ASSERT_EQ(t.births.size(), 3u);
    EXPECT_NEAR(t.births[0].tau, kPi / 4, 1e-15);
    EXPECT_NEAR(t.births[1].tau, kPi / 2, 1e-15);
    EXPECT_NEAR(t.births[2].tau, 3 * kPi / 4, 1e-15);
    EXPECT_NEAR(t.collisions[0].xi, 1.1847503659236949, 1e-11);
    EXPECT_NEAR(t.collisions[0].tau, curve::tau_of_xi(t.collisions[0].xi, 1.0), 1e-14);
    EXPECT_THROW(curve::build_branch_table(1.0, 0), ValidationError);
}

TEST(BranchTable, CollisionTimesOrderedAndExcessBounded) {
    for (double lambda : {0.5, 1.0, 2.0}) {
        const auto t = curve::build_branch_table(lambda, 3000);
        double first = 0.0;
        double worst = 0.0;
        for (const auto& c : t.collisions) {
            ASSERT_LT(curve::tau_j(c.j, lambda), c.tau);
            ASSERT_LT(c.tau, curve::tau_j(c.j + 1, lambda));
            const double scaled = c.j * lambda * lambda * c.tau_excess;
            if (c.j == beatnls::fixtures::kJ0) first = scaled;
            if (c.j >= beatnls::fixtures::kJ0) worst = std::max(worst, scaled);
        }
        EXPECT_LE(worst, 2.0 * first) << lambda;
    }
}

TEST(EnumerateSolutions, MatchesSignScanAtTauFive) {
    const auto roots = curve::enumerate_solutions(5.0, 1.0);
    const auto oracle = scan_xi(5.0, 1.0, 5.0, 10.0, 1e-6);
    ASSERT_EQ(roots.size(), oracle.size());
    for (std::size_t i = 0; i < roots.size(); ++i) {
        EXPECT_NEAR(roots[i].xi, oracle[i], 1e-9);
        EXPECT_NEAR(roots[i].y, std::sqrt(oracle[i] / 10.0), 1e-9);
    }
}

TEST(EnumerateSolutions, SmallTauGivesSingleRootNearLambda) {
    const auto r = curve::enumerate_solutions(1e-8, 1.0);
    ASSERT_EQ(r.size(), 1u);
    EXPECT_NEAR(r[0].y, 1.0, 1e-7);
    EXPECT_EQ(r[0].branch_index, 1);
}

TEST(EnumerateSolutions, BirthPointReportedOnceWithBothIndices) {
    const auto r = curve::enumerate_solutions(curve::birth_tau(3, 1.0), 1.0);
    int degenerate = 0;
    for (const auto& v : r) {
        if (v.partner_index != 0 && !v.at_collision) {
            ++degenerate;
            EXPECT_NEAR(v.y, 1.0, 1e-12);
            EXPECT_EQ(v.branch_index, 6);
            EXPECT_EQ(v.partner_index, 7);
        }
    }
    EXPECT_EQ(degenerate, 1);
}

TEST(EnumerateSolutions, RejectsBadInput) {
    EXPECT_THROW(curve::enumerate_solutions(0.0, 1.0), ValidationError);
    EXPECT_THROW(curve::enumerate_solutions(1.0, -1.0), ValidationError);
}

TEST(EnumerateSolutions, ResidualWindowAndOrderProperty) {
    for (double lambda : {0.7, 1.0, 1.9}) {
        for (int i = 1; i <= 400; ++i) {
            const double tau = 0.013 * i * i / (lambda * lambda);
            const auto r = curve::enumerate_solutions(tau, lambda);
            ASSERT_FALSE(r.empty());
            for (std::size_t k = 0; k < r.size(); ++k) {
                const auto& v = r[k];
                EXPECT_LT(std::abs(v.y * curve::h_eval(2 * tau * v.y * v.y) - lambda), 1e-11);
                EXPECT_GE(v.y, lambda / kSqrt2 - 1e-12);
                EXPECT_LE(v.y, lambda + 1e-12);
                if (k > 0) {
                    EXPECT_GT(v.y, r[k - 1].y);
                }
            }
        }
    }
}

TEST(BranchMonotonicity, EvenBranchesFallOddBranchesDipThenRise) {
    const double lambda = 1.0;
    for (std::int64_t j = 2; j <= 6; ++j) {
        const double a = curve::birth_tau(j - 1, lambda);
        const double b = curve::collision(j, lambda).tau;
        double prev_even = 10.0;
        double prev_odd = 10.0;
        const double tj = curve::tau_j(j, lambda);
        for (int i = 1; i < 500; ++i) {
            const double tau = a + (b - a) * i / 500.0;
            if (auto e = curve::branch_value(2 * j, tau, lambda)) {
                EXPECT_LE(e->y, prev_even + 1e-12);
                prev_even = e->y;
            }
            if (auto o = curve::branch_value(2 * j - 1, tau, lambda)) {
                if (tau < tj) {
                    EXPECT_LE(o->y, prev_odd + 1e-12);
                }
                if (tau > tj && prev_odd < 10.0 && tau - (b - a) / 500.0 > tj) {
                    EXPECT_GE(o->y, prev_odd - 1e-12);
                }
                prev_odd = o->y;
            }
        }
    }
}

TEST(MinimalSolution, DipsToLowerEdgeAtTauJ) {
    for (std::int64_t j : {3, 10, 100}) {
        const auto m = curve::minimal_solution(curve::tau_j(j, 1.0), 1.0);
        EXPECT_NEAR(m.y, 1.0 / kSqrt2, 1e-10) << j;
    }
}

TEST(MinimalSolution, BeforeFirstBirthIsUnique) {
    const auto r = curve::enumerate_solutions(kPi / 8, 1.0);
    ASSERT_EQ(r.size(), 1u);
    EXPECT_NEAR(curve::minimal_solution_Y(kPi / 8, 1.0), 0.75076554455099904, 1e-11);
}

TEST(MinimalSolution, LargeIndexGapWithinCalibratedConstant) {
    for (std::int64_t j : {100, 1000, 10000}) {
        const double y = curve::minimal_solution_Y(curve::tau_j(j, 1.0), 1.0);
        EXPECT_GE(y - 1.0 / kSqrt2, -1e-12);
        EXPECT_LE(y - 1.0 / kSqrt2, beatnls::fixtures::kMinimalConstant / j);
    }
}

TEST(MinimalSolution, LeftContinuousAtCollision) {
    const auto c = curve::collision(1, 1.0);
    const auto m = curve::minimal_solution(c.tau, 1.0);
    EXPECT_NEAR(m.y, 0.76749891876121073, 1e-9);
}

TEST(RateJ, Limits) {
    EXPECT_NEAR(curve::rate_J(1.0, 1e-4), 1.0, 1e-3);
    EXPECT_NEAR(curve::rate_J(1.0, curve::tau_j(10000, 1.0)), 1.0 / kSqrt2, 1e-4);
}

TEST(RateJ, JumpUsesRightLimit) {
    const double t = curve::collision(1, 1.0).tau;
    const auto r = curve::rate_function(1.0, t);
    EXPECT_TRUE(r.is_jump);
    EXPECT_NEAR(r.J, 0.91195620394059480, 1e-9);
    EXPECT_GT(r.J, 0.76749891876121073);
    const auto right = curve::enumerate_solutions(t + 1e-7, 1.0);
    EXPECT_NEAR(r.J, right.front().y, 1e-7);
}

TEST(RateJ, RangeAndRightContinuityProperty) {
    for (double z0 : {0.5, 1.0, 3.0}) {
        for (int i = 1; i <= 300; ++i) {
            const double tau = 0.037 * i;
            const double J = curve::rate_J(z0, tau);
            EXPECT_GE(J, z0 / kSqrt2 - 1e-12);
            EXPECT_LE(J, z0 + 1e-12);
        }
        for (std::int64_t j = 1; j <= 20; ++j) {
            const double t = curve::collision(j, z0).tau;
            const double at = curve::rate_J(z0, t);
            const double right = curve::rate_J(z0, t * (1.0 + 1e-7));
            EXPECT_NEAR(at, right, 1e-5) << "z0=" << z0 << " j=" << j;
        }
    }
}

TEST(MuFixedPoint, AgreesWithHighPrecisionRoots) {
    const auto s = curve::mu_solution(100, 0.0);
    EXPECT_NEAR(s.xi_minus, 156.19695389970009, 1e-9);
    EXPECT_NEAR(s.xi_plus, 156.39789162787266, 1e-9);
    EXPECT_GE(s.mu_plus, 1.0 / (100 * kPi));
    EXPECT_LE(s.mu_plus, 0.4);
}

TEST(MuFixedPoint, BoundaryCaseAtLargeIndex) {
    const auto m = curve::mu_fixed_point(1000000, kPi, curve::MuSign::minus);
    EXPECT_GE(m.mu, 0.0);
    EXPECT_LE(m.mu, 0.004);
}

TEST(MuFixedPoint, BoundsAndBisectionAgreementOverZetaGrid) {
    for (std::int64_t j : {beatnls::fixtures::kJ0, std::int64_t{100}, std::int64_t{1000}}) {
        for (double z : curve::zeta_grid(33)) {
            const auto s = curve::mu_solution(j, z);
            const double T = kPi * j - 1.5 * kPi + z;
            const double c = curve::collision_xi(j);
            const auto lo = scan_xi(T / 2, 1.0, (j - 1) * kPi / 2, c, (c - (j - 1) * kPi / 2) / 64);
            const auto hi = scan_xi(T / 2, 1.0, c, j * kPi / 2, (j * kPi / 2 - c) / 64);
            ASSERT_EQ(lo.size(), 1u);
            // A tangential root at the kink jπ/2 has no sign change.
            const double xi_plus = hi.empty() ? j * kPi / 2 : hi[0];
            ASSERT_LE(hi.size(), 1u);
            EXPECT_NEAR(s.xi_minus, lo[0], 1e-9);
            EXPECT_NEAR(s.xi_plus, xi_plus, 1e-9) << "j=" << j << " z=" << z;
            const double cap = 4.0 / std::sqrt(static_cast<double>(j));
            EXPECT_GE(s.mu_minus, -1e-15);
            EXPECT_LE(s.mu_minus, cap);
            EXPECT_GE(s.mu_plus, 1.0 / (kPi * j));
            EXPECT_LE(s.mu_plus, cap);
        }
    }
}

TEST(LambdaPerturbation, MonotoneAndLipschitz) {
    const double lambda0 = 1.0;
    const std::int64_t j = 8;
    const double tau = 0.5 * (curve::tau_j(j, lambda0) + curve::collision(j, lambda0).tau);
    double prev_slope_odd = 0.0;
    for (double h : {1e-4, 5e-5, 2.5e-5}) {
        double prev_odd = -1.0, prev_even = 10.0;
        for (int k = -4; k <= 4; ++k) {
            const double lam = lambda0 + k * h;
            const auto odd = curve::branch_value(2 * j - 1, tau, lam);
            const auto even = curve::branch_value(2 * j, tau, lam);
            ASSERT_TRUE(odd && even);
            EXPECT_GE(odd->y, prev_odd - 1e-12);
            EXPECT_LE(even->y, prev_even + 1e-12);
            prev_odd = odd->y;
            prev_even = even->y;
        }
        const double s = (curve::branch_value(2 * j - 1, tau, lambda0 + h)->y -
                          curve::branch_value(2 * j - 1, tau, lambda0 - h)->y) / (2 * h);
        if (prev_slope_odd > 0.0) {
            EXPECT_NEAR(s, prev_slope_odd, 0.05 * prev_slope_odd);
        }
        prev_slope_odd = s;
    }
}

TEST(GapLowerBound, HoldsWithCalibratedConstant) {
    using beatnls::fixtures::kGapConstant;
    using beatnls::fixtures::kJ0;
    for (std::int64_t j = kJ0 + 2; j <= 500; j += 7) {
        const double a = curve::tau_j(j - 2, 1.0);
        const double b = curve::collision(j, 1.0).tau;
        for (int i = 0; i <= 8; ++i) {
            const double tau = a + (b - a) * i / 8.0;
            const auto g = curve::branch_gap_lower_bound_check(tau, 1.0, kGapConstant, kJ0);
            EXPECT_TRUE(g.pass) << "tau=" << tau << " gap=" << g.gap_sum << " bound=" << g.bound;
        }
    }
}

TEST(GapLowerBound, GapFromSignScanAtTau50) {
    const double tau = curve::tau_j(50, 1.0);
    const auto oracle = scan_xi(tau, 1.0, tau, 2 * tau, 1e-5);
    ASSERT_GE(oracle.size(), 4u);
    std::vector<double> y;
    for (int i = 0; i < 4; ++i) y.push_back(std::sqrt(oracle[i] / (2 * tau)));
    const auto g = curve::branch_gap_sum(tau, 1.0);
    EXPECT_NEAR(g.gap_sum, (y[1] - y[0]) + (y[3] - y[2]), 1e-8);
}

TEST(GapLowerBound, RejectsIndexBelowJ0) {
    EXPECT_THROW(curve::branch_gap_lower_bound_check(curve::tau_j(2, 1.0), 1.0, 1.0, 5), ValidationError);
}
