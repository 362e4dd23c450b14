#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "beatnls/fixtures.hpp"
#include "beatnls/rng.hpp"
#include "beatnls/tail_probability.hpp"

namespace tail = beatnls::tail;
using beatnls::ComputationError;
using beatnls::CounterRng;
using beatnls::ValidationError;

namespace {

struct McResult {
    double p;
    double se;
};

/// Plain Monte Carlo over independent Rayleigh moduli with E a² = σa², E b² = σb².
template <class Event>
McResult rayleigh_mc(const tail::VariancePair& v, std::int64_t n, std::uint64_t stream, Event&& event) {
    const CounterRng rng(424242, stream);
    std::int64_t hits = 0;
    for (std::int64_t i = 0; i < n; ++i) {
        const auto c = static_cast<std::uint64_t>(2 * i);
        if (event(rng.rayleigh(c, v.sigma_a2), rng.rayleigh(c + 1, v.sigma_b2))) ++hits;
    }
    const double p = static_cast<double>(hits) / static_cast<double>(n);
    return {p, std::sqrt(p * (1 - p) / static_cast<double>(n))};
}

}  // namespace

TEST(L2Tail, EqualVarianceExample) {
    EXPECT_NEAR(tail::l2_tail(2.0, {1.0, 1.0}), 3.0 * std::exp(-2.0), 1e-15);
    EXPECT_NEAR(tail::l2_tail(1e-9, {1.0, 1.0}), 1.0, 1e-15);
    EXPECT_NEAR(tail::l2_tail(1e-9, {2.0, 1.0}), 1.0, 1e-15);
}

TEST(L2Tail, DistinctVarianceFormula) {
    const double z = 2.0;
    EXPECT_NEAR(tail::l2_tail(z, {2.0, 1.0}), 2.0 * std::exp(-1.0) - std::exp(-2.0), 1e-15);
    EXPECT_NEAR(tail::l2_tail(z, {1.0, 2.0}), 2.0 * std::exp(-1.0) - std::exp(-2.0), 1e-15);
}

TEST(L2Tail, DistinctBranchConvergesToEqualBranch) {
    const double eq = tail::l2_tail(2.5, {1.3, 1.3});
    double prev = 1.0;
    for (double gap : {1e-3, 1e-4, 1e-5, 1e-6, 1e-7}) {
        const double d = std::abs(tail::l2_tail(2.5, {1.3 + gap, 1.3}) - eq);
        EXPECT_LT(d, prev);
        EXPECT_LT(d, gap);
        prev = d;
    }
}

TEST(L2Tail, MatchesMonteCarlo) {
    std::uint64_t stream = 1;
    for (const tail::VariancePair v : {tail::VariancePair{1.0, 1.0}, tail::VariancePair{2.0, 1.0}}) {
        for (double z : {1.0, 2.0, 3.0}) {
            const auto mc = rayleigh_mc(v, 1000000, stream++, [z](double a, double b) { return 2 * (a * a + b * b) > z * z; });
            EXPECT_LE(std::abs(tail::l2_tail(z, v) - mc.p), 3 * mc.se) << "z=" << z;
        }
    }
}

TEST(L1Tail, HighPrecisionValues) {
    EXPECT_NEAR(tail::l1_tail(3.0, {1.0, 1.0}), 0.041779828755119234, 1e-12);
    EXPECT_NEAR(tail::l1_tail(2.0, {2.0, 1.0}), 0.53652067039592630, 1e-12);
    EXPECT_NEAR(tail::l1_tail(1.0, {1.5, 0.5}), 0.86426731789690765, 1e-12);
    EXPECT_NEAR(tail::l1_tail(1e-9, {1.0, 1.0}), 1.0, 1e-12);
}

TEST(L1Tail, MatchesMonteCarlo) {
    std::uint64_t stream = 100;
    for (const tail::VariancePair v : {tail::VariancePair{1.0, 1.0}, tail::VariancePair{2.0, 1.0}}) {
        for (double z : {1.0, 2.0, 3.0}) {
            const auto mc = rayleigh_mc(v, 1000000, stream++, [z](double a, double b) { return a + b > z; });
            EXPECT_LE(std::abs(tail::l1_tail(z, v) - mc.p), 3 * mc.se) << "z=" << z;
        }
    }
}

TEST(L1Tail, ScaledLimitApproachedMonotonically) {
    const tail::VariancePair v{2.0, 1.0};
    const double target = -1.0 / 3.0;
    double prev = 1e9;
    for (double lam : {5.0, 10.0, 20.0}) {
        const double gap = std::abs(tail::log_l1_tail(lam, v) / (lam * lam) - target);
        EXPECT_LT(gap, prev);
        prev = gap;
    }
    EXPECT_LT(prev, 0.01);
}

TEST(Regions, ExamplesForA) {
    EXPECT_TRUE(tail::region_A_member(0.6, 0.5, 1e-9, 1.0, 10.0));
    EXPECT_FALSE(tail::region_A_member(0.4, 0.5, 1e-9, 1.0, 10.0));
    for (double tau : {0.1, 0.785, 3.0, 17.0}) EXPECT_TRUE(tail::region_A_member(1.3, 0.0, tau, 1.3, 10.0));
    EXPECT_FALSE(tail::region_A_member(15.0, 6.0, 0.1, 1.0, 10.0));
}

TEST(Regions, ExamplesForB) {
    EXPECT_TRUE(tail::region_B_member(1.2, 0.0, 0.7, 1.2, 0.1, 10.0));
    for (double b : {0.0, 0.05, 0.1}) EXPECT_FALSE(tail::region_B_member(1.2 / std::numbers::sqrt2 - 1e-9, b, 0.7, 1.2, 0.1, 10.0));
    EXPECT_FALSE(tail::region_B_member(1.5, 0.2, 0.7, 1.2, 0.1, 10.0));
    EXPECT_FALSE(tail::region_B_member(11.0, 0.0, 0.7, 1.2, 0.1, 10.0));
}

TEST(Regions, SetSandwichProperty) {
    const CounterRng rng(7, 7);
    std::uint64_t c = 0;
    for (int i = 0; i < 200000; ++i) {
        const double a = 3 * rng.uniform(c++);
        const double b = 3 * rng.uniform(c++);
        const double tau = 50 * rng.uniform(c++);
        const double lam = 0.2 + 2 * rng.uniform(c++);
        if (tail::region_A_member(a, b, tau, lam, 10.0)) {
            ASSERT_GE(std::numbers::sqrt2 * std::hypot(a, b), lam - 1e-12);
        }
        const double small_tau = 1e-3 / (lam * lam);
        if (a + b >= lam * (1 + 1e-2)) {
            ASSERT_TRUE(tail::region_A_member(a, b, small_tau, lam, 10.0));
        }
    }
}

TEST(Inclusion, CalibratedConstantGivesZeroViolations) {
    for (double tau : beatnls::fixtures::kInclusionTaus) {
        for (double eps : beatnls::fixtures::kInclusionEps) {
            const auto r = tail::inclusion_check(tau, eps, 1.0, beatnls::fixtures::kC1, 10.0, 100000, 99);
            EXPECT_EQ(r.samples, 100000);
            EXPECT_EQ(r.violations, 0) << "tau=" << tau << " eps=" << eps;
        }
    }
}

TEST(Inclusion, LoweredLevelAdmitsCounterexamples) {
    const auto r = tail::inclusion_check(5.0, 0.1, 1.0, beatnls::fixtures::kC1, 10.0, 20000, 1,
                                         tail::InclusionShift::lowered);
    EXPECT_GT(r.violations, 0);
}

TEST(RegimeSpec, ValidationMessagesNameTheConstraint) {
    tail::RegimeSpec s;
    s.delta = 1.5;
    try {
        tail::validate(s);
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("delta ∈ (0,1)"), std::string::npos);
    }
    s.delta = 0.3;
    s.gamma = 2.4;
    try {
        tail::validate(s);
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("(5/2)(1-delta)=1.75"), std::string::npos);
    }
    s.gamma = 0.0;
    s.cutoff_c = 5.0;
    EXPECT_THROW(tail::validate(s), ValidationError);
}

TEST(RegimeSpec, TargetsByRegime) {
    tail::RegimeSpec s;
    EXPECT_NEAR(tail::rate_target(s, {2.0, 1.0}).target, -1.0 / 3.0, 1e-15);
    EXPECT_NEAR(tail::rate_target(s, {1.0, 1.0}).target, -0.5, 1e-15);
    s.gamma = 1.6;
    EXPECT_EQ(tail::classify(s, {2.0, 1.0}), tail::Regime::super_resonant);
    EXPECT_NEAR(tail::rate_target(s, {2.0, 1.0}).target, -0.25, 1e-15);
    s.gamma = 1.4;
    const auto r = tail::rate_target(s, {2.0, 1.0});
    EXPECT_EQ(r.regime, tail::Regime::resonant);
    EXPECT_TRUE(std::isnan(r.target));
    EXPECT_NEAR(r.upper, -0.25, 1e-15);
    const double J = beatnls::curve::rate_J(1.0, 1.0);
    EXPECT_NEAR(r.lower, -J * J / 2.0, 1e-15);
}

TEST(Quadrature, TinyTimeReducesToL1Tail) {
    tail::RegimeSpec s;
    s.c_time = 1e-10;
    const tail::VariancePair v{2.0, 1.0};
    for (double eps : {0.3, 0.1}) {
        const auto q = tail::log_tail_quadrature(s, v, eps);
        const double z = q.lambda / std::pow(eps, s.delta);
        EXPECT_NEAR(q.log_p, tail::log_l1_tail(z, v), 2e-3 * std::abs(q.log_p) + q.err) << eps;
        EXPECT_LE(q.log_p, 0.0);
    }
}

TEST(Quadrature, AgreesWithImportanceSampling) {
    tail::RegimeSpec s;
    s.gamma = 1.0;
    const tail::VariancePair v{2.0, 1.0};
    for (double eps : {0.3, 0.2, 0.1}) {
        const auto q = tail::log_tail_quadrature(s, v, eps);
        const auto m = tail::log_tail_monte_carlo(s, v, eps, {1000000, 5, 2});
        EXPECT_LE(std::abs(q.log_p - m.log_p), 3 * std::hypot(q.err, m.err)) << eps;
    }
}

TEST(Quadrature, MonotoneInThresholdAndVariance) {
    double lp[3][3];
    for (int i = 0; i < 3; ++i) {
        for (int k = 0; k < 3; ++k) {
            tail::RegimeSpec s;
            s.z0 = 0.8 + 0.2 * i;
            s.cutoff_c = 13.0;
            lp[i][k] = tail::log_tail_quadrature(s, {1.5 + 0.5 * k, 1.0}, 0.1, {512, 256, 3}).log_p;
        }
    }
    for (int i = 0; i < 3; ++i) {
        for (int k = 0; k < 3; ++k) {
            if (i > 0) {
                EXPECT_LE(lp[i][k], lp[i - 1][k]);
            }
            if (k > 0) {
                EXPECT_GE(lp[i][k], lp[i][k - 1]);
            }
        }
    }
}

TEST(Quadrature, RejectsNonPositiveThreshold) {
    tail::RegimeSpec s;
    s.c2 = 5.0;
    EXPECT_THROW(tail::log_tail_quadrature(s, {2.0, 1.0}, 0.5), ValidationError);
}

TEST(MonteCarlo, DeterministicForFixedWorkerCount) {
    tail::RegimeSpec s;
    for (int w : {1, 3}) {
        const auto a = tail::log_tail_monte_carlo(s, {2.0, 1.0}, 0.2, {200000, 11, w});
        const auto b = tail::log_tail_monte_carlo(s, {2.0, 1.0}, 0.2, {200000, 11, w});
        EXPECT_EQ(a.log_p, b.log_p);
        EXPECT_EQ(a.err, b.err);
    }
}

TEST(MonteCarlo, ErrorHalvesWithFourTimesSamples) {
    tail::RegimeSpec s;
    const auto a = tail::log_tail_monte_carlo(s, {2.0, 1.0}, 0.2, {250000, 3, 1});
    const auto b = tail::log_tail_monte_carlo(s, {2.0, 1.0}, 0.2, {1000000, 3, 1});
    EXPECT_NEAR(a.err / b.err, 2.0, 0.2);
}

TEST(MonteCarlo, UntiltedMatchesDirectSampling) {
    tail::RegimeSpec s;
    s.gamma = 0.5;
    const tail::VariancePair v{2.0, 1.0};
    const auto m = tail::log_tail_monte_carlo(s, v, 0.5, {400000, 21, 1, 0.0});
    const auto d = tail::log_tail_direct_sampling(s, v, 0.5, 400000, 22);
    EXPECT_LE(std::abs(m.log_p - d.log_p), 3 * std::hypot(m.err, d.err));
}

TEST(MonteCarlo, RejectsTooFewSamples) {
    EXPECT_THROW(tail::log_tail_monte_carlo(tail::RegimeSpec{}, {2.0, 1.0}, 0.2, {100}), ValidationError);
}

TEST(LdpSweep, SubResonantGapShrinks) {
    tail::RegimeSpec s;
    const auto rows = tail::ldp_sweep(s, {2.0, 1.0}, {0.3, 0.1, 0.03});
    ASSERT_EQ(rows.size(), 3u);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        EXPECT_LT(std::abs(rows[i].estimate.scaled + 1.0 / 3.0), std::abs(rows[i - 1].estimate.scaled + 1.0 / 3.0));
    }
    EXPECT_EQ(tail::regime_label(rows[0].target.regime), "sub-resonant");
}

TEST(LdpSweep, RejectsBadInputs) {
    EXPECT_THROW(tail::ldp_sweep(tail::RegimeSpec{}, {2.0, 1.0}, {0.1, 0.3}), ValidationError);
    EXPECT_THROW(tail::ldp_sweep(tail::RegimeSpec{}, {2.0, 1.0}, {}), ValidationError);
    EXPECT_THROW(tail::ldp_sweep(tail::RegimeSpec{}, {2.0, 1.0}, {0.1}, tail::Method::closed_form), ValidationError);
}

TEST(LdpSweep, UpperEnvelopeAtAnyTime) {
    const tail::VariancePair v{2.0, 1.0};
    for (double g : {0.0, 0.7, 1.4, 1.6}) {
        tail::RegimeSpec s;
        s.gamma = g;
        const auto q = tail::log_tail_quadrature(s, v, 1e-4);
        EXPECT_LE(q.scaled, -0.25 + 0.02) << g;
    }
}
