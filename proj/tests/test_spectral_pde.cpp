#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <filesystem>
#include <numbers>

#include "beatnls/spectral_pde.hpp"

namespace pde = beatnls::pde;
namespace dyn = beatnls::dyn;
using cplx = std::complex<double>;
using beatnls::ValidationError;

namespace {

constexpr double kPi = std::numbers::pi;

/// ℋ by a dense trapezoid rule on direct evaluations of the interpolant.
double energy_by_trapezoid(const pde::FourierField& f, double coupling, int m = 10000) {
    double kin = 0.0;
    double quart = 0.0;
    for (int j = 0; j < m; ++j) {
        const double x = 2 * kPi * j / m;
        cplx u{}, ux{};
        for (int k = -f.n / 2; k < f.n / 2; ++k) {
            const cplx e = f.coeff(k) * std::polar(1.0, k * x);
            u += e;
            ux += cplx(0.0, k) * e;
        }
        kin += std::norm(ux);
        quart += std::cos(2 * x) * std::norm(u) * std::norm(u);
    }
    return (kin + 0.5 * coupling * quart) * 2 * kPi / m;
}

double max_coeff_distance(const pde::FourierField& a, const pde::FourierField& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.c.size(); ++i) d = std::max(d, std::abs(a.c[i] - b.c[i]));
    return d;
}

}  // namespace

TEST(InitTwoMode, PlacesResonantPair) {
    const auto f = pde::init_two_mode({{1.0, 0.0}, {0.0, 0.0}, 0.1}, 64);
    EXPECT_EQ(f.coeff(1), cplx(0.1, 0.0));
    for (int k = -32; k < 32; ++k) {
        if (k != 1) {
            EXPECT_EQ(f.coeff(k), cplx{});
        }
    }
    const dyn::InitialData d{{0.3, 0.4}, {-1.0, 0.5}, 0.2};
    EXPECT_NEAR(pde::mass(pde::init_two_mode(d, 32)), 2 * kPi * 0.04 * (0.25 + 1.25), 1e-15);
    EXPECT_DOUBLE_EQ(pde::mass(pde::init_two_mode({{0, 0}, {0, 0}, 0.1}, 8)), 0.0);
    EXPECT_THROW(pde::init_two_mode(d, 4), ValidationError);
    EXPECT_THROW(pde::init_two_mode(d, 48), ValidationError);
}

TEST(Energy, ZeroAndSingleMode) {
    EXPECT_DOUBLE_EQ(pde::energy_functional(pde::FourierField(16)), 0.0);
    const auto f = pde::init_two_mode({{1.0, 0.0}, {0.0, 0.0}, 0.3}, 16);
    EXPECT_NEAR(pde::energy_functional(f), 2 * kPi * 0.09, 1e-14);
}

TEST(Energy, TwoModeMatchesDenseQuadrature) {
    const double eps = 0.3;
    const auto f = pde::init_two_mode({{1.0, 0.0}, {1.0, 0.0}, eps}, 16);
    const double e = pde::energy_functional(f);
    EXPECT_NEAR(e, energy_by_trapezoid(f, pde::kDefaultCoupling), 1e-12);
    EXPECT_NEAR(e, 4 * kPi * eps * eps + 16 * kPi * std::pow(eps, 4), 1e-12);
}

TEST(Energy, GeneralFieldMatchesDenseQuadrature) {
    pde::FourierField f(16);
    f.coeff(0) = {0.1, 0.05};
    f.coeff(1) = {0.2, -0.1};
    f.coeff(-1) = {0.05, 0.15};
    f.coeff(3) = {-0.02, 0.01};
    f.coeff(-5) = {0.01, 0.0};
    for (double g : {1.0, 4.0}) EXPECT_NEAR(pde::energy_functional(f, g), energy_by_trapezoid(f, g), 1e-12);
}

TEST(StrangStep, SubstepsPreserveModuli) {
    pde::FourierField f = pde::init_two_mode({{1.0, 0.2}, {0.5, -0.3}, 0.3}, 32);
    pde::StrangStepper st(32, false);
    const beatnls::FftPlan plan(32);
    for (int s = 0; s < 200; ++s) {
        const auto before = f.c;
        st.linear(f, 0.01);
        for (std::size_t i = 0; i < f.c.size(); ++i) ASSERT_NEAR(std::abs(f.c[i]), std::abs(before[i]), 1e-14);
        const auto g0 = pde::to_grid(f, plan);
        st.nonlinear(f, 0.02);
        const auto g1 = pde::to_grid(f, plan);
        for (std::size_t i = 0; i < g0.size(); ++i) ASSERT_NEAR(std::abs(g1[i]), std::abs(g0[i]), 1e-14);
    }
}

TEST(StrangStep, LinearSubstepFixesZeroMode) {
    pde::FourierField f(16);
    f.coeff(0) = {0.7, -0.2};
    pde::StrangStepper st(16, true);
    st.linear(f, 3.7);
    EXPECT_EQ(f.coeff(0), cplx(0.7, -0.2));
}

TEST(StrangStep, RejectsNonPositiveStep) {
    const auto f = pde::init_two_mode({}, 16);
    EXPECT_THROW(pde::step_strang(f, 0.0), ValidationError);
}

TEST(StrangStep, SecondOrderSelfConvergence) {
    const dyn::InitialData d{{1.0, 0.0}, {0.5, 0.3}, 0.5};
    auto run = [&](double dt) {
        pde::PdeRunConfig c;
        c.n = 32;
        c.dt = dt;
        c.t_end = 2.0;
        c.sample_every = 1 << 30;
        return pde::solve_pde(c, d).back().field;
    };
    const auto ref = run(0.1 / 8);
    const double e1 = max_coeff_distance(run(0.1), ref);
    const double e2 = max_coeff_distance(run(0.05), ref);
    EXPECT_NEAR(e1 / e2, 4.0, 0.6);
}

TEST(SolvePde, MassAndEnergyDrift) {
    const dyn::InitialData d{{1.0, 0.0}, {0.5, 0.3}, 0.1};
    const auto tr = pde::solve_pde(pde::PdeRunConfig{}, d);
    EXPECT_DOUBLE_EQ(tr.back().t, 100.0);
    for (const auto& s : tr) {
        EXPECT_LE(std::abs(s.mass - tr.front().mass) / tr.front().mass, 1e-10);
        EXPECT_LE(std::abs(s.energy - tr.front().energy) / tr.front().energy, 1e-8);
    }
}

TEST(SolvePde, BeatingFollowsClosedFormPeriod) {
    const dyn::InitialData d{{1.0, 0.0}, {0.0, 0.0}, 0.1};
    const double period = kPi / (2 * d.eps * d.eps);
    pde::PdeRunConfig c;
    c.t_end = 2.2 * period;
    c.sample_every = 20;
    const auto tr = pde::solve_pde(c, d);
    double lo = 1.0, hi = 0.0;
    std::vector<double> up;
    const double level = 0.5 * d.eps * d.eps;
    for (std::size_t i = 0; i < tr.size(); ++i) {
        const double a = std::norm(tr[i].field.coeff(1));
        lo = std::min(lo, a);
        hi = std::max(hi, a);
        if (i > 0) {
            const double p = std::norm(tr[i - 1].field.coeff(1)) - level;
            const double q = a - level;
            if (p < 0.0 && q >= 0.0) up.push_back(tr[i - 1].t + (tr[i].t - tr[i - 1].t) * p / (p - q));
        }
    }
    EXPECT_NEAR(hi, d.eps * d.eps, 0.05 * d.eps * d.eps);
    EXPECT_LT(lo, 0.05 * d.eps * d.eps);
    ASSERT_EQ(up.size(), 2u);
    EXPECT_NEAR((up[1] - up[0]) / period, 1.0, 0.02);
}

TEST(SolvePde, ResolutionStability) {
    const dyn::InitialData d{{1.0, 0.0}, {0.5, 0.3}, 0.2};
    pde::PdeRunConfig a;
    a.t_end = 10.0;
    a.sample_every = 500;
    pde::PdeRunConfig b = a;
    b.n = 128;
    const auto ra = pde::pde_table(pde::solve_pde(a, d), d);
    const auto rb = pde::pde_table(pde::solve_pde(b, d), d);
    ASSERT_EQ(ra.size(), rb.size());
    for (std::size_t i = 0; i < ra.size(); ++i) EXPECT_NEAR(ra[i].sup_pde, rb[i].sup_pde, 1e-10);
}

TEST(SupNorm, OffGridMaximumIsRecovered) {
    pde::FourierField f(8);
    f.coeff(1) = {1.0, 0.0};
    f.coeff(0) = {1.0, 0.0};
    f.coeff(3) = {0.3, 0.4};
    double mx = 0.0;
    for (int i = 0; i < 400000; ++i) mx = std::max(mx, std::abs(pde::eval_at(f, 2 * kPi * i / 400000.0)));
    EXPECT_NEAR(pde::sup_norm_field(f), mx, 1e-9);
    EXPECT_GE(pde::sup_norm_field(f), mx - 1e-12);
}

TEST(NormalForm, ZeroAmplitudeGivesZeroGap) {
    pde::PdeRunConfig c;
    c.t_end = 10.0;
    const auto g = pde::compare_to_normal_form(c, {{1.0, 0.0}, {0.0, 0.0}, 0.0}, 0.0);
    EXPECT_DOUBLE_EQ(g.sup_gap, 0.0);
    EXPECT_DOUBLE_EQ(g.tail_mass, 0.0);
}

TEST(NormalForm, RejectsHorizonBeyondValidity) {
    pde::PdeRunConfig c;
    c.t_end = 1e4;
    EXPECT_THROW(pde::compare_to_normal_form(c, {{1.0, 0.0}, {0.0, 0.0}, 0.2}, 0.0), ValidationError);
}

TEST(NormalForm, GapShrinksWithAmplitude) {
    double prev_gap = 1.0, prev_tail = 1.0;
    for (double eps : {0.2, 0.1}) {
        pde::PdeRunConfig c;
        c.t_end = 1.0 / (eps * eps);
        c.sample_every = 50;
        const auto g = pde::compare_to_normal_form(c, {{1.0, 0.0}, {0.5, 0.3}, eps}, 0.0);
        EXPECT_LT(g.sup_gap, prev_gap / 4.0);
        EXPECT_LT(g.tail_mass, prev_tail / 4.0);
        prev_gap = g.sup_gap;
        prev_tail = g.tail_mass;
    }
}

TEST(Checkpoint, RoundTripIsBitExact) {
    const dyn::InitialData d{{1.0, 0.0}, {0.5, 0.3}, 0.2};
    pde::PdeRunConfig c;
    c.t_end = 1.0;
    const auto f = pde::solve_pde(c, d).back().field;
    const auto path = (std::filesystem::temp_directory_path() / "beatnls_ckpt_test.bin").string();
    pde::write_checkpoint(path, f, c.dt);
    EXPECT_EQ(std::filesystem::file_size(path), 32u + 16u * 64u);
    const auto r = pde::read_checkpoint(path);
    EXPECT_EQ(r.field.n, 64);
    EXPECT_EQ(r.field.t, f.t);
    EXPECT_EQ(r.dt, c.dt);
    for (std::size_t i = 0; i < f.c.size(); ++i) EXPECT_EQ(r.field.c[i], f.c[i]);
    std::filesystem::remove(path);
}
