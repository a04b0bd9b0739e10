#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "agesis/simulate.hpp"
#include "agesis/spectral.hpp"

using namespace agesis;

namespace {

const ModelParams kRef{0.6, 0.2, 0.81};
const double kXi = 1.0256410256410256;

SimConfig base_config(double tau, double dt, double t_end) {
    SimConfig cfg;
    cfg.tau = tau;
    cfg.dt = dt;
    cfg.t_end = t_end;
    return cfg;
}

// Synthetic oscillation with a prescribed amplitude envelope, for exercising
// the diagnostics in isolation.
Trajectory synthetic(double t_end, double dt, double period, double growth) {
    Trajectory tr;
    for (double t = 0.0; t <= t_end + 1e-12; t += dt) {
        tr.times.push_back(t);
        tr.s.push_back(3.0 + std::exp(growth * t) *
                                 std::sin(2.0 * std::numbers::pi * t / period));
        tr.p.push_back(1.0);
        tr.j.push_back(1.0);
        tr.b.push_back(1.0);
    }
    tr.s_final = tr.s.back();
    return tr;
}

}  // namespace

TEST_CASE("delay reduction has the endemic point as an exact fixed point") {
    const DdeSystem sys = reduce_to_dde(kRef, 24.0);
    CHECK(sys.xi == doctest::Approx(kXi).epsilon(1e-14));
    const auto eq = sys.equilibrium_state();
    CHECK(eq[0] == doctest::Approx(1.0 + kXi).epsilon(1e-14));
    CHECK(eq[1] == doctest::Approx(kXi).epsilon(1e-14));
    CHECK(eq[2] == doctest::Approx(kXi).epsilon(1e-14));
    const double b_bar = sys.boundary(eq[0], eq[1], eq[2]);
    CHECK(b_bar == doctest::Approx(24.0 * kXi).epsilon(1e-13));
    const auto rhs = sys.rhs(eq, b_bar);
    for (double r : rhs) CHECK(std::abs(r) < 1e-12);
}

TEST_CASE("configuration guards reject structural mistakes") {
    CHECK_THROWS_AS(integrate_dde(kRef, base_config(0.0, 1e-3, 10.0)), ConfigError);
    CHECK_THROWS_AS(integrate_dde(kRef, base_config(24.0, 3e-3, 10.0)), ConfigError);
    CHECK_THROWS_AS(integrate_dde(kRef, base_config(24.0, -1e-3, 10.0)), ConfigError);
    CHECK_THROWS_AS(integrate_dde(kRef, base_config(24.0, 1e-3, 0.0)), ConfigError);
    {
        SimConfig cfg = base_config(24.0, 1e-3, 10.0);
        cfg.stride = -1;
        CHECK_THROWS_AS(integrate_dde(kRef, cfg), ConfigError);
    }
    {
        SimConfig cfg = base_config(24.0, 1e-3, 10.0);
        cfg.epsilon = -1.5;
        CHECK_THROWS_AS(integrate_dde(kRef, cfg), ConfigError);
    }
    {
        SimConfig cfg = base_config(24.0, 1e-3, 10.0);
        cfg.seed = SeedKind::custom;
        cfg.s0 = -1.0;
        cfg.b0 = 0.0;
        CHECK_THROWS_AS(integrate_dde(kRef, cfg), ConfigError);
    }
    {
        SimConfig cfg = base_config(24.0, 1e-3, 10.0);
        cfg.scheme = Scheme::pde;
        cfg.a_max = 1.5;  // below 1 + 40/24
        CHECK_THROWS_AS(integrate_pde(kRef, cfg), ConfigError);
    }
}

TEST_CASE("blowup detection reports the escape time") {
    SimConfig cfg = base_config(24.0, 1e-3, 10.0);
    cfg.seed = SeedKind::custom;
    cfg.s0 = 2e12;
    cfg.b0 = 1.0;
    try {
        integrate_dde(kRef, cfg);
        FAIL("expected BlowupError");
    } catch (const BlowupError& e) {
        CHECK(e.time >= 0.0);
        CHECK(e.time < 1.0);
    }
}

TEST_CASE("infection-free seed stays infection-free and relaxes to lambda/mu") {
    SimConfig cfg = base_config(24.0, 1e-3, 50.0);
    cfg.seed = SeedKind::custom;
    cfg.s0 = 1.0;
    cfg.b0 = 0.0;
    const Trajectory tr = integrate_dde(kRef, cfg);
    CHECK(tr.p_final == 0.0);
    CHECK(tr.j_final == 0.0);
    CHECK(tr.b_final == 0.0);
    // S' = tau (lambda - mu S) alone: S -> lambda/mu = 3.
    CHECK(std::abs(tr.s_final - 3.0) < 1e-6);
}

TEST_CASE("delay scheme converges at fourth order through the seed kinks") {
    // Terminal state at t = 4 (crossing the boundary jump at 0 and kinks at
    // 1, 2, 3) against a dt = 2.5e-4 reference.
    auto terminal = [&](double dt) {
        const Trajectory tr = integrate_dde(kRef, base_config(24.0, dt, 4.0));
        return tr.s_final;
    };
    const double ref = terminal(2.5e-4);
    const double e1 = std::abs(terminal(4e-3) - ref);
    const double e2 = std::abs(terminal(2e-3) - ref);
    const double e3 = std::abs(terminal(1e-3) - ref);
    const double slope12 = std::log2(e1 / e2);
    const double slope23 = std::log2(e2 / e3);
    CHECK(slope12 > 3.7);
    CHECK(slope12 < 4.3);
    CHECK(slope23 > 3.7);
    CHECK(slope23 < 4.5);
}

TEST_CASE("both schemes agree and their gap shrinks with the step") {
    auto sup_gap = [&](double dt) {
        SimConfig cfg = base_config(24.0, dt, 50.0);
        cfg.stride = std::lround(0.02 / dt);
        const Trajectory d = integrate_dde(kRef, cfg);
        SimConfig cp = cfg;
        cp.scheme = Scheme::pde;
        const Trajectory q = integrate_pde(kRef, cp);
        REQUIRE(d.times.size() == q.times.size());
        double gap = 0.0, scale = 0.0;
        for (size_t i = 0; i < d.times.size(); ++i) {
            gap = std::max(gap, std::abs(d.p[i] - q.p[i]));
            scale = std::max(scale, std::abs(d.p[i]));
        }
        return gap / scale;
    };
    const double g2 = sup_gap(2e-3);
    const double g1 = sup_gap(1e-3);
    CHECK(g1 < 1e-3);
    CHECK(g2 / g1 >= 1.8);  // the gap is dominated by a step-size error
}

TEST_CASE("transport scheme fixed point and integrated balance") {
    const TransportCheck chk = frozen_boundary_check(24.0, 1e-4);
    CHECK(chk.l1_error < 1e-6);
    CHECK(chk.mass_defect < 1e-8);
}

TEST_CASE("truncation detector separates negligible from significant tails") {
    CHECK_FALSE(tail_mass_significant(1e-18, 1.0));
    CHECK(tail_mass_significant(1e-10, 1.0));
    // The automatic cutoff 1 + 40/tau keeps the equilibrium tail at e^-40.
    const Trajectory tr = integrate_pde(kRef, base_config(24.0, 2e-3, 10.0));
    CHECK_FALSE(tr.truncated);
}

TEST_CASE("equilibrium seed with no perturbation is stationary on both schemes") {
    for (Scheme scheme : {Scheme::dde, Scheme::pde}) {
        SimConfig cfg = base_config(24.0, 2e-3, 50.0);
        cfg.epsilon = 0.0;
        cfg.scheme = scheme;
        const Trajectory tr = integrate(kRef, cfg);
        for (size_t i = 0; i < tr.times.size(); ++i) {
            CHECK(std::abs(tr.s[i] - (1.0 + kXi)) < 1e-8);
            CHECK(std::abs(tr.p[i] - kXi) < 1e-8);
            CHECK(std::abs(tr.j[i] - kXi) < 1e-8);
        }
    }
}

TEST_CASE("states stay positive through the oscillation transient") {
    SimConfig cfg = base_config(24.0, 2e-3, 100.0);
    cfg.stride = 10;
    const Trajectory tr = integrate_dde(kRef, cfg);
    for (size_t i = 0; i < tr.times.size(); ++i) {
        CHECK(tr.s[i] > 0.0);
        CHECK(tr.p[i] > 0.0);
        CHECK(tr.j[i] > 0.0);
        CHECK(tr.b[i] > 0.0);
    }
}

TEST_CASE("beyond the first crossing the oscillation sustains at the right period") {
    SimConfig cfg = base_config(24.0, 2e-3, 200.0);
    cfg.stride = 5;
    const Trajectory tr = integrate_dde(kRef, cfg);
    const Diagnostics d = diagnose(tr);
    CHECK(d.verdict == "sustained");
    CHECK(d.amplitude > 0.1);
    REQUIRE(d.peak_times.size() >= 3);
    // Scaled limit-cycle period versus the linear crossing period 2 pi /
    // (tau omega0): the finite-amplitude shift stays inside 5%.
    const double w0 = omega0(reduced_coeffs(kRef));
    const double linear_period = 2.0 * std::numbers::pi / (24.0 * w0);
    CHECK(std::abs(d.period - linear_period) / linear_period < 0.05);
    CHECK(d.period == doctest::Approx(2.1827).epsilon(2e-3));
    // Peaks are reported in increasing time within the trailing window.
    for (size_t i = 1; i < d.peak_times.size(); ++i)
        CHECK(d.peak_times[i] > d.peak_times[i - 1]);
}

TEST_CASE("near onset with a tiny seed the frequency matches the linear theory") {
    const ReducedCoeffs rc = reduced_coeffs(kRef);
    const double w0 = omega0(rc);
    const double tau0 = tau_k(rc, w0, 0).tau_k;
    SimConfig cfg = base_config(tau0 + 0.05, 1e-3, 100.0);
    cfg.epsilon = 1e-4;
    cfg.stride = 10;
    const Trajectory tr = integrate_dde(kRef, cfg);
    const Diagnostics d = diagnose(tr);
    const double linear_period = 2.0 * std::numbers::pi / ((tau0 + 0.05) * w0);
    CHECK(std::abs(d.period - linear_period) / linear_period < 0.01);
}

TEST_CASE("diagnostics verdicts from prescribed envelopes") {
    CHECK(diagnose(synthetic(100.0, 0.01, 2.0, 0.0)).verdict == "sustained");
    CHECK(diagnose(synthetic(100.0, 0.01, 2.0, 0.01)).verdict == "growing");
    CHECK(diagnose(synthetic(100.0, 0.01, 2.0, -0.01)).verdict == "decaying");
    const Diagnostics d = diagnose(synthetic(100.0, 0.01, 2.0, 0.0));
    CHECK(d.period == doctest::Approx(2.0).epsilon(1e-4));
    CHECK(d.amplitude == doctest::Approx(2.0).epsilon(1e-3));  // peak minus trough
}

TEST_CASE("diagnostics refuse flat or peak-poor series") {
    SimConfig cfg = base_config(24.0, 2e-3, 20.0);
    cfg.epsilon = 0.0;
    CHECK_THROWS_AS(diagnose(integrate_dde(kRef, cfg)), InsufficientDataError);
    CHECK_THROWS_AS(diagnose(synthetic(1.0, 0.01, 2.0, 0.0)), InsufficientDataError);
    Trajectory tiny;
    tiny.times = {0.0, 1.0};
    tiny.s = {1.0, 1.0};
    CHECK_THROWS_AS(diagnose(tiny), InsufficientDataError);
}

TEST_CASE("delay sweep brackets the oscillation onset") {
    SimConfig base = base_config(0.0, 5e-3, 1200.0);
    base.stride = 20;
    const SweepResult sw = sweep_amplitude(kRef, {23.0, 23.25}, base);
    REQUIRE(sw.rows.size() == 2);
    CHECK(sw.rows[0].verdict == "decaying");
    CHECK(sw.rows[1].verdict != "decaying");
    CHECK(sw.rows[0].ratio < 0.8);
    CHECK(sw.last_decaying == 23.0);
    CHECK(sw.onset_tau == 23.25);
}

TEST_CASE("trailing phase-plane loop closes on the previous one") {
    SimConfig cfg = base_config(24.0, 2e-3, 200.0);
    cfg.stride = 10;
    const Trajectory tr = integrate_dde(kRef, cfg);
    const Diagnostics d = diagnose(tr);
    CHECK(loop_closure_fraction(tr, d.period) < 0.01);
    Trajectory tiny;
    tiny.times = {0.0, 1.0};
    tiny.s = {1.0, 1.0};
    tiny.p = {1.0, 1.0};
    CHECK_THROWS_AS(loop_closure_fraction(tiny, 2.0), InsufficientDataError);
}

TEST_CASE("transport scheme can capture the age surface") {
    SimConfig cfg = base_config(24.0, 2e-3, 10.0);
    cfg.scheme = Scheme::pde;
    AgeSurface surf;
    integrate_pde(kRef, cfg, &surf);
    REQUIRE_FALSE(surf.times.empty());
    REQUIRE_FALSE(surf.ages.empty());
    REQUIRE(surf.density.size() == surf.times.size());
    for (const auto& row : surf.density) CHECK(row.size() == surf.ages.size());
    CHECK(surf.times.front() == 0.0);
    CHECK(surf.ages.front() == 0.0);
    CHECK(surf.ages.back() <= 1.0 + 40.0 / 24.0 + 1e-12);
    // The first captured row is the seeded profile (1+eps) xi tau e^(-tau a).
    for (size_t ai = 0; ai < surf.ages.size(); ++ai) {
        const double expect = 1.05 * kXi * 24.0 * std::exp(-24.0 * surf.ages[ai]);
        CHECK(surf.density[0][ai] == doctest::Approx(expect).epsilon(1e-10));
    }
    // Density stays nonnegative everywhere on the surface.
    for (const auto& row : surf.density)
        for (double v : row) CHECK(v >= 0.0);
}

TEST_CASE("sampling stride only changes which points are recorded") {
    SimConfig fine = base_config(24.0, 2e-3, 10.0);
    fine.stride = 1;
    SimConfig coarse = fine;
    coarse.stride = 50;
    const Trajectory a = integrate_dde(kRef, fine);
    const Trajectory b = integrate_dde(kRef, coarse);
    CHECK(a.s_final == b.s_final);  // finals are stride-independent
    REQUIRE(a.times.size() == 5001);
    REQUIRE(b.times.size() == 101);
    for (size_t i = 0; i < b.times.size(); ++i) {
        CHECK(b.times[i] == a.times[50 * i]);
        CHECK(b.s[i] == a.s[50 * i]);
    }
}
