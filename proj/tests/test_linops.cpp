#include <cmath>
#include <complex>

#include "css/functionals.hpp"
#include "css/grid.hpp"
#include "css/linops.hpp"
#include "css/soliton.hpp"
#include "doctest.h"

namespace {

using namespace css;

std::vector<double> unit_bump(const RadialGrid& g, double center, double width) {
    std::vector<double> v(g.n, 0.0);
    for (int i = 1; i < g.n - 1; ++i) {
        const double r = g.r[i];
        v[i] = r * std::exp(-(r - center) * (r - center) / (2.0 * width * width));
    }
    const double norm = l2_norm(v, g);
    for (auto& x : v) x /= norm;
    return v;
}

TEST_CASE("linops: scaling direction of the closed-form profile") {
    RadialGrid g = make_grid(2049, 16.0);
    std::vector<double> q = selfdual_profile(0, g);
    std::vector<double> sdir = scaling_direction(q, g);
    // q + r q' = sqrt(8) (1 - r^2) / (1 + r^2)^2 for the radially symmetric profile
    double sup = 0.0;
    for (int i = 0; i < g.n; ++i) {
        const double r = g.r[i];
        if (r > 12.0) continue;
        const double rho = r * r;
        const double exact = std::sqrt(8.0) * (1.0 - rho) / ((1.0 + rho) * (1.0 + rho));
        sup = std::max(sup, std::abs(sdir[i] - exact));
    }
    CHECK(sup < 1e-3);
    // the direction changes sign exactly once, at r = 1
    const int before = static_cast<int>(0.9 / g.h);
    const int after = static_cast<int>(1.1 / g.h) + 1;
    CHECK(sdir[before] > 0.0);
    CHECK(sdir[after] < 0.0);
}

TEST_CASE("linops: linearized operator reproduces its closed-form image") {
    RadialGrid g = make_grid(2049, 16.0);
    std::vector<double> q = selfdual_profile(0, g);
    GaugePotentials gp = compute_gauge(q, 0, g);
    std::vector<double> img = apply_linearized(q, q, gp.a_theta, 0, g);
    // on the m = 0 profile the operator maps q to (4 r / (1 + r^2)) q
    double sup = 0.0;
    for (int i = 0; i < g.n; ++i) {
        const double r = g.r[i];
        if (r > 0.8 * g.r_max) continue;
        const double exact = 4.0 * r / (1.0 + r * r) * q[i];
        sup = std::max(sup, std::abs(img[i] - exact));
    }
    CHECK(sup < 2e-3);
}

TEST_CASE("linops: complex application acts on the parts separately") {
    RadialGrid g = make_grid(257, 12.0);
    std::vector<double> q = selfdual_profile(1, g);
    GaugePotentials gp = compute_gauge(q, 1, g);
    std::vector<double> fr = unit_bump(g, 2.0, 0.8), fi = unit_bump(g, 3.0, 1.1);
    std::vector<std::complex<double>> f(g.n);
    for (int i = 0; i < g.n; ++i) f[i] = {fr[i], fi[i]};
    std::vector<std::complex<double>> img = apply_linearized(f, q, gp.a_theta, 1, g);
    std::vector<double> ir = apply_linearized(fr, q, gp.a_theta, 1, g);
    std::vector<double> ii = apply_linearized(fi, q, gp.a_theta, 1, g);
    for (int i = 0; i < g.n; ++i) {
        CHECK(img[i].real() == doctest::Approx(ir[i]).epsilon(1e-14).scale(1.0));
        CHECK(img[i].imag() == doctest::Approx(ii[i]).epsilon(1e-14).scale(1.0));
    }
}

TEST_CASE("linops: quadratic form obeys the parallelogram law") {
    SolitonProfile p = solve_standing_wave(1, 1.0, 0.0, 513, 12.0);
    std::vector<double> f = unit_bump(p.grid, 1.5, 0.7);
    std::vector<double> h = unit_bump(p.grid, 3.0, 1.2);
    std::vector<double> fp(f), fm(f);
    for (int i = 0; i < p.grid.n; ++i) {
        fp[i] += h[i];
        fm[i] -= h[i];
    }
    const double lhs = coercivity_form(fp, p) + coercivity_form(fm, p);
    const double rhs = 2.0 * coercivity_form(f, p) + 2.0 * coercivity_form(h, p);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("linops: cubic defect term is quadratic in its argument and small on the "
          "zero-defect family") {
    SolitonProfile p1 = solve_standing_wave(1, 1.0, 0.0, 1025, 16.0);
    std::vector<double> f = unit_bump(p1.grid, 2.0, 0.9);
    const double x1 = quadratic_defect_term(f, p1);
    CHECK(std::abs(x1) < 1e-2);
    std::vector<double> f2(f);
    for (auto& x : f2) x *= 2.0;
    CHECK(quadratic_defect_term(f2, p1) == doctest::Approx(4.0 * x1).epsilon(1e-10).scale(1e-12));

    SolitonProfile p2 = solve_standing_wave(1, 1.5, 1.0, 513, 12.0);
    std::vector<double> f3 = unit_bump(p2.grid, 1.5, 0.8);
    CHECK(std::abs(quadratic_defect_term(f3, p2)) > 1e-8);
}

TEST_CASE("linops: spectral setup invariants") {
    SolitonProfile p = solve_standing_wave(1, 1.5, 1.0, 513, 12.0);
    LinearizedSetup s = build_setup(p);
    const RadialGrid& g = s.profile.grid;

    CHECK(s.lambda_min < 0.0);
    CHECK(s.psi.front() == 0.0);
    CHECK(s.psi.back() == 0.0);
    double wnorm = 0.0;
    for (int i = 0; i < g.n; ++i) wnorm += g.w[i] * s.psi[i] * s.psi[i];
    CHECK(kTwoPi * wnorm == doctest::Approx(1.0).epsilon(1e-10));

    const double ray = coercivity_form(s.psi, s.profile);
    CHECK(std::abs(ray - s.lambda_min) <= 1e-8 * std::max(1.0, std::abs(s.lambda_min)));

    REQUIRE(s.eigenvalues.size() >= 2);
    CHECK(s.eigenvalues[0] == s.lambda_min);
    CHECK(s.lambda_min_projected == s.eigenvalues[1]);
    for (size_t k = 1; k < s.eigenvalues.size(); ++k)
        CHECK(s.eigenvalues[k] >= s.eigenvalues[k - 1]);

    std::vector<double> sdir = scaling_direction(s.profile.q, g);
    double raw = 0.0;
    for (int i = 0; i < g.n; ++i) raw += g.w[i] * sdir[i] * s.psi[i];
    raw *= kTwoPi;
    CHECK(raw > 0.0);
    CHECK(s.transversality_raw == doctest::Approx(raw).epsilon(1e-12));
    CHECK(s.transversality == doctest::Approx(raw / l2_norm(sdir, g)).epsilon(1e-12));
}

TEST_CASE("linops: the zero-defect family has a nonnegative form") {
    SolitonProfile p = solve_standing_wave(1, 1.0, 0.0, 513, 16.0);
    LinearizedSetup s = build_setup(p);
    CHECK(s.lambda_min > -1e-6);
    CHECK(s.lambda_min < 0.05);
}

TEST_CASE("linops: oversized profiles are downsampled for the dense eigensolve") {
    SolitonProfile p = solve_standing_wave(1, 1.0, 0.0, 4097, 16.0);
    LinearizedSetup s = build_setup(p);
    CHECK(s.profile.grid.n == 1025);
    CHECK(s.profile.grid.r_max == p.grid.r_max);
    CHECK(s.profile.strategy.find("+strided") != std::string::npos);
    CHECK(s.lambda_min > -1e-6);
}

TEST_CASE("linops: energy expansion remainder is quadratic under the plain model") {
    SolitonProfile p = solve_standing_wave(1, 1.5, 1.0, 513, 12.0);
    ExpansionCheck c = energy_expansion_check(p, ExpansionModel::kQuadraticForm, 2, 11);
    REQUIRE(c.slopes.size() == 2);
    REQUIRE(c.amplitudes.size() == 9);
    CHECK(!c.degenerate);
    for (double s : c.slopes) {
        CHECK(s > 1.6);
        CHECK(s < 2.4);
    }
    for (const auto& dir : c.remainders)
        for (double r : dir) CHECK(std::isfinite(r));
    // same seed, same numbers
    ExpansionCheck c2 = energy_expansion_check(p, ExpansionModel::kQuadraticForm, 2, 11);
    for (size_t k = 0; k < c.slopes.size(); ++k) CHECK(c.slopes[k] == c2.slopes[k]);
}

TEST_CASE("linops: modulation fit recovers synthetic frames") {
    SolitonProfile p = solve_standing_wave(1, 1.5, 1.0, 513, 12.0);
    LinearizedSetup s = build_setup(p);
    const int n = p.grid.n;

    ModulationFrame gen;
    gen.lambda = 1.1;
    gen.gamma = 0.3;
    gen.eps.assign(n, {0.0, 0.0});
    std::vector<std::complex<double>> u = reconstruct_from_frame(gen, p);

    ModulationFrame fit = fit_modulation(u, s, FitMode::kNearest);
    CHECK(std::abs(fit.lambda - 1.1) < 1e-8);
    CHECK(std::abs(fit.gamma - 0.3) < 1e-8);
    CHECK(fit.eps_norm < 1e-8);

    ModulationFrame ortho = fit_modulation(u, s, FitMode::kOrthogonal);
    CHECK(std::abs(ortho.lambda - 1.1) < 1e-6);
    CHECK(ortho.constraint_norm < 1e-10);

    // a global phase shifts gamma and nothing else
    std::vector<std::complex<double>> u2(u);
    for (auto& z : u2) z *= std::polar(1.0, 0.5);
    ModulationFrame fit2 = fit_modulation(u2, s, FitMode::kNearest);
    CHECK(std::abs(fit2.gamma - (0.3 - 0.5)) < 1e-8);
    CHECK(std::abs(fit2.lambda - 1.1) < 1e-8);

    // a seed far from the basin walks out of its trust region
    CHECK_THROWS_AS(fit_modulation(u, s, FitMode::kNearest, 20.0), BasinEscape);

    // fits invert the reconstruction on states with a genuine residual part
    std::vector<std::complex<double>> u3(n);
    std::vector<double> b1 = unit_bump(p.grid, 2.0, 0.8), b2 = unit_bump(p.grid, 3.5, 1.2);
    for (int i = 0; i < n; ++i)
        u3[i] = p.q[i] + std::complex<double>(0.05 * b1[i], 0.02 * b2[i]);
    ModulationFrame fit3 = fit_modulation(u3, s, FitMode::kNearest);
    std::vector<std::complex<double>> recon = reconstruct_from_frame(fit3, p);
    double num = 0.0, den = 0.0;
    for (int i = 0; i < n; ++i) {
        num += p.grid.w[i] * std::norm(recon[i] - u3[i]);
        den += p.grid.w[i] * std::norm(u3[i]);
    }
    CHECK(std::sqrt(num / den) < 1e-6);
}

TEST_CASE("linops: modulation fit input validation") {
    SolitonProfile p = solve_standing_wave(1, 1.5, 1.0, 513, 12.0);
    LinearizedSetup s = build_setup(p);
    std::vector<std::complex<double>> wrong(100, 0.0);
    CHECK_THROWS_AS(fit_modulation(wrong, s, FitMode::kNearest), BadConfig);
    std::vector<std::complex<double>> u(p.grid.n, 0.0);
    CHECK_THROWS_AS(fit_modulation(u, s, FitMode::kNearest, -1.0), BadConfig);
}

}  // namespace
