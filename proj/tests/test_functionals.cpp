#include <cmath>
#include <complex>

#include "css/functionals.hpp"
#include "css/grid.hpp"
#include "css/soliton.hpp"
#include "doctest.h"

namespace {

using namespace css;

std::vector<std::complex<double>> chirped_gaussian(const RadialGrid& g, double kappa) {
    std::vector<std::complex<double>> u(g.n);
    for (int i = 0; i < g.n; ++i)
        u[i] = std::exp(-0.5 * g.r[i] * g.r[i]) * std::polar(1.0, kappa * g.r[i] * g.r[i]);
    return u;
}

TEST_CASE("functionals: charge of the closed-form profile") {
    RadialGrid g = make_grid(2049, 20.0);
    std::vector<double> q = selfdual_profile(1, g);
    CHECK(mass(q, g) == doctest::Approx(selfdual_charge(1)).epsilon(2e-5));
}

TEST_CASE("functionals: quartic density of a Gaussian") {
    RadialGrid g = make_grid(2049, 12.0);
    std::vector<std::complex<double>> u = chirped_gaussian(g, 0.0);
    // 2 pi int exp(-2 r^2) r dr = pi/2 (1 - exp(-2 R^2))
    CHECK(l4_density(u, g) == doctest::Approx(0.5 * M_PI).epsilon(1e-5));
}

TEST_CASE("functionals: both energy forms are phase invariant and agree to quadrature order") {
    RadialGrid g = make_grid(513, 12.0);
    const int m = 1;
    const double coupling = 1.5;
    std::vector<std::complex<double>> u(g.n);
    for (int i = 0; i < g.n; ++i)
        u[i] = g.r[i] * std::exp(-0.5 * g.r[i] * g.r[i]) *
               std::polar(0.9, 0.2 * g.r[i] * g.r[i]);

    const double e1 = energy(u, m, coupling, g);
    std::vector<std::complex<double>> v(g.n);
    for (int i = 0; i < g.n; ++i) v[i] = u[i] * std::polar(1.0, 1.234);
    CHECK(energy(v, m, coupling, g) == doctest::Approx(e1).epsilon(1e-14));
    CHECK(energy_selfdual_form(v, m, coupling, g) ==
          doctest::Approx(energy_selfdual_form(u, m, coupling, g)).epsilon(1e-14));

    // refine the grid twice; the gap between the forms shrinks at O(h^2)
    double gap_prev = 0.0;
    for (int level = 0; level < 3; ++level) {
        RadialGrid gf = make_grid(512 * (1 << level) + 1, 12.0);
        std::vector<std::complex<double>> uf(gf.n);
        for (int i = 0; i < gf.n; ++i)
            uf[i] = gf.r[i] * std::exp(-0.5 * gf.r[i] * gf.r[i]) *
                    std::polar(0.9, 0.2 * gf.r[i] * gf.r[i]);
        const double gap = std::abs(energy(uf, m, coupling, gf) -
                                    energy_selfdual_form(uf, m, coupling, gf));
        if (level > 0) CHECK(gap_prev / gap > 3.0);
        gap_prev = gap;
    }
}

TEST_CASE("functionals: second moment of a Gaussian") {
    RadialGrid g = make_grid(2049, 12.0);
    std::vector<std::complex<double>> u = chirped_gaussian(g, 0.0);
    // 1/4 * 2 pi int r^2 exp(-r^2) r dr = pi/4
    CHECK(virial_moment(u, g) == doctest::Approx(0.25 * M_PI).epsilon(1e-5));
}

TEST_CASE("functionals: moment flux of a chirped Gaussian") {
    RadialGrid g = make_grid(2049, 12.0);
    const double kappa = 0.3;
    std::vector<std::complex<double>> u = chirped_gaussian(g, kappa);
    // Im(conj(u) u') = 2 kappa r exp(-r^2), so the flux is 2 pi kappa
    CHECK(virial_flux(u, g) == doctest::Approx(kTwoPi * kappa).epsilon(1e-4));
    std::vector<std::complex<double>> real_field(g.n);
    for (int i = 0; i < g.n; ++i) real_field[i] = std::exp(-g.r[i]);
    CHECK(std::abs(virial_flux(real_field, g)) < 1e-12);
}

TEST_CASE("functionals: localized momentum weight") {
    CHECK(morawetz_weight(0.0) == 0.0);
    CHECK(morawetz_weight(0.5) == 0.5);
    CHECK(morawetz_weight(1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(morawetz_weight(2.0) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(morawetz_weight(5.0) == 1.5);
    // continuity at the knots and monotonicity across the blend
    CHECK(morawetz_weight(1.0 + 1e-12) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(morawetz_weight(2.0 - 1e-12) == doctest::Approx(1.5).epsilon(1e-9));
    double prev = morawetz_weight(1.0);
    for (int k = 1; k <= 100; ++k) {
        const double cur = morawetz_weight(1.0 + 0.01 * k);
        CHECK(cur >= prev - 1e-12);
        prev = cur;
    }
}

TEST_CASE("functionals: localized momentum matches the flux once R covers the field") {
    RadialGrid g = make_grid(2049, 16.0);
    std::vector<std::complex<double>> u = chirped_gaussian(g, 0.25);
    // the weight is exactly s below R, so R beyond the support reproduces the flux
    CHECK(morawetz(u, g, 6.0) == doctest::Approx(virial_flux(u, g)).epsilon(1e-10));
    CHECK_THROWS_AS(morawetz(u, g, 0.0), BadConfig);
    CHECK_THROWS_AS(morawetz(u, g, 9.0), BadConfig);
}

TEST_CASE("functionals: conserved report matches the individual functionals") {
    RadialGrid g = make_grid(257, 8.0);
    RadialField f;
    f.m = 1;
    f.g = 1.5;
    f.grid = g;
    f.u = chirped_gaussian(g, 0.1);
    ConservedReport rep = conserved_report(f, 0.25);
    CHECK(rep.t == 0.25);
    CHECK(rep.mass == mass(f.u, g));
    CHECK(rep.energy == energy(f.u, f.m, f.g, g));
    CHECK(rep.energy_sd == energy_selfdual_form(f.u, f.m, f.g, g));
    CHECK(rep.l4 == l4_density(f.u, g));
    CHECK(rep.virial_v == virial_moment(f.u, g));
    CHECK(rep.virial_dv == virial_flux(f.u, g));
}

}  // namespace
