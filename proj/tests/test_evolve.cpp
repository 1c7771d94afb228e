#include <cmath>
#include <complex>

#include "css/evolve.hpp"
#include "css/functionals.hpp"
#include "css/grid.hpp"
#include "css/linops.hpp"
#include "css/soliton.hpp"
#include "doctest.h"

namespace {

using namespace css;

RadialField gaussian_state(int n, double r_max) {
    RadialField f;
    f.m = 1;
    f.g = 1.5;
    f.grid = make_grid(n, r_max);
    f.u.resize(n);
    for (int i = 0; i < n; ++i)
        f.u[i] = 1.5 * f.grid.r[i] * std::exp(-0.5 * f.grid.r[i] * f.grid.r[i]);
    f.u[n - 1] = 0.0;
    return f;
}

double rel_gap(const std::vector<std::complex<double>>& a,
               const std::vector<std::complex<double>>& b, const RadialGrid& g) {
    double num = 0.0, den = 0.0;
    for (int i = 0; i < g.n; ++i) {
        num += g.w[i] * std::norm(a[i] - b[i]);
        den += g.w[i] * std::norm(b[i]);
    }
    return std::sqrt(num / den);
}

TEST_CASE("evolve: configuration validation") {
    RadialField f = gaussian_state(257, 12.0);
    EvolutionConfig c;
    c.dt = 0.0;
    CHECK_THROWS_AS(evolve(f, c), BadConfig);
    c.dt = 1e-3;
    c.t_end = -1.0;
    CHECK_THROWS_AS(evolve(f, c), BadConfig);
    c.t_end = 0.0105;  // not an integer number of steps
    CHECK_THROWS_AS(evolve(f, c), BadConfig);
    c.t_end = 0.01;
    c.sample_every = 0;
    CHECK_THROWS_AS(evolve(f, c), BadConfig);
    c.sample_every = 1;
    c.track = true;
    CHECK_THROWS_AS(evolve(f, c), BadConfig);
    CHECK_THROWS_AS(Stepper(1, 1.5, f.grid, 0.0), BadConfig);
}

TEST_CASE("evolve: cell mass is conserved to round-off and samples follow the schedule") {
    RadialField f = gaussian_state(513, 12.0);
    EvolutionConfig c;
    c.dt = 1e-3;
    c.t_end = 0.2;
    c.sample_every = 50;
    Trajectory tr = evolve(f, c);

    REQUIRE(tr.times.size() == 5);
    for (size_t k = 0; k < tr.times.size(); ++k)
        CHECK(tr.times[k] == doctest::Approx(0.05 * k).epsilon(1e-12));
    CHECK(tr.stop_reason == "completed");
    CHECK(!tr.truncated);

    const double m0 = tr.reports.front().mass;
    CHECK(std::abs(tr.reports.back().mass - m0) / m0 < 1e-11);
    CHECK(tr.max_step_mass_drift < 1e-12);
    CHECK(tr.reports.back().mass == doctest::Approx(mass(tr.states.back(), f.grid)).epsilon(1e-14));

    // splitting keeps the energy within its second-order envelope
    const double e0 = tr.reports.front().energy;
    CHECK(std::abs(tr.reports.back().energy - e0) < 1e-4 * std::max(1.0, std::abs(e0)));
}

TEST_CASE("evolve: reversing the step retraces the trajectory") {
    RadialField f = gaussian_state(513, 12.0);
    EvolutionConfig c;
    c.dt = 1e-3;
    c.t_end = 0.1;
    c.sample_every = 100;
    Trajectory fwd = evolve(f, c);
    RadialField back = f;
    back.u = fwd.states.back();
    c.dt = -1e-3;
    c.t_end = -0.1;
    Trajectory rev = evolve(back, c);
    CHECK(rel_gap(rev.states.back(), f.u, f.grid) < 1e-9);
}

TEST_CASE("evolve: standing wave rotates in phase only") {
    SolitonProfile p = solve_standing_wave(1, 1.5, 1.0, 513, 12.0);
    RadialField f;
    f.m = p.m;
    f.g = p.g;
    f.grid = p.grid;
    f.u.assign(p.q.begin(), p.q.end());

    EvolutionConfig c;
    c.dt = 1e-3;
    c.t_end = 0.2;
    c.sample_every = 50;
    Trajectory tr = evolve(f, c);

    std::vector<std::complex<double>> expect(p.grid.n);
    const double t = tr.times.back();
    for (int i = 0; i < p.grid.n; ++i) expect[i] = p.q[i] * std::polar(1.0, p.alpha * t);
    CHECK(rel_gap(tr.states.back(), expect, p.grid) < 1e-3);
}

TEST_CASE("evolve: modulation tracking follows the rotating frame") {
    SolitonProfile p = solve_standing_wave(1, 1.5, 1.0, 513, 12.0);
    LinearizedSetup setup = build_setup(p);
    RadialField f;
    f.m = p.m;
    f.g = p.g;
    f.grid = p.grid;
    f.u.assign(p.q.begin(), p.q.end());

    EvolutionConfig c;
    c.dt = 1e-3;
    c.t_end = 0.2;
    c.sample_every = 50;
    c.track = true;
    Trajectory tr = evolve(f, c, &setup);

    REQUIRE(tr.modulation.size() == tr.times.size());
    const double qn = l2_norm(p.q, p.grid);
    for (const TrackSample& s : tr.modulation) {
        CHECK(std::abs(s.lambda - 1.0) < 1e-3);
        CHECK(std::abs(std::remainder(s.gamma + p.alpha * s.t, kTwoPi)) < 1e-2);
        CHECK(s.eps_norm < 1e-3 * qn);
    }

    // an absurdly high resolution floor truncates at the first sample
    c.lambda_floor_factor = 100.0;
    Trajectory stopped = evolve(f, c, &setup);
    CHECK(stopped.truncated);
    CHECK(stopped.stop_reason == "fitted scale below the resolution floor");
    CHECK(stopped.times.size() == 1);
}

TEST_CASE("evolve: rescaling preserves mass and scales the energy") {
    RadialField f = gaussian_state(1025, 12.0);
    const double lam = 1.7;
    RadialField g2 = rescale(f, lam);
    CHECK(std::abs(mass(g2.u, g2.grid) - mass(f.u, f.grid)) / mass(f.u, f.grid) < 1e-6);
    const double e1 = energy(f.u, f.m, f.g, f.grid);
    const double e2 = energy(g2.u, g2.m, g2.g, g2.grid);
    CHECK(std::abs(e2 - lam * lam * e1) / std::abs(lam * lam * e1) < 1e-3);
    CHECK_THROWS_AS(rescale(f, 0.0), BadConfig);
}

TEST_CASE("evolve: time-inversion image keeps the mass") {
    RadialField f = gaussian_state(1025, 12.0);
    CHECK_THROWS_AS(pseudoconformal(f, 0.0), BadConfig);
    for (double t : {1.5, -1.5}) {
        RadialField v = pseudoconformal(f, t);
        CHECK(std::abs(mass(v.u, v.grid) - mass(f.u, f.grid)) / mass(f.u, f.grid) < 1e-3);
    }
}

TEST_CASE("evolve: the concentrating family is exact at its construction point") {
    SolitonProfile p = solve_standing_wave(1, 1.5, 1.0, 513, 12.0);
    CHECK_THROWS_AS(pc_blowup_reference(p, 1.0, 1.0), BadConfig);

    RadialField ref = pc_blowup_reference(p, 1.0, 0.3);
    auto [lam, gam] = fit_blowup_family(ref.u, p, 1.0, 1.4);
    CHECK(std::abs(lam - 0.7) < 1e-8);
    CHECK(std::abs(std::remainder(gam - p.alpha / 0.7, kTwoPi)) < 1e-8);
    CHECK_THROWS_AS(fit_blowup_family(ref.u, p, -1.0, 0.0), BadConfig);
}

TEST_CASE("evolve: small fields disperse") {
    RadialField f = gaussian_state(513, 16.0);
    for (auto& z : f.u) z *= 0.1;
    EvolutionConfig c;
    c.dt = 2e-3;
    c.t_end = 1.0;
    c.sample_every = 250;
    Trajectory tr = evolve(f, c);
    CHECK(tr.reports.back().l4 < 0.8 * tr.reports.front().l4);
}

}  // namespace
