#pragma once

#include <cmath>
#include <complex>
#include <cstdio>
#include <vector>

#include "css/gauge.hpp"
#include "css/grid.hpp"

namespace css {

// Charge 2 pi int |u|^2 r dr with the cell quadrature; this is the quantity the
// Crank-Nicolson step conserves to round-off.
template <class Field>
double mass(const Field& u, const RadialGrid& g) {
    std::vector<double> dens = density_of(u);
    double acc = 0.0;
    for (int i = 0; i < g.n; ++i) acc += g.cw[i] * dens[i];
    return kTwoPi * acc;
}

namespace detail {
inline double abs2(double x) { return x * x; }
inline double abs2(const std::complex<double>& z) { return std::norm(z); }
}  // namespace detail

// Energy in the gauge-covariant form
//   E = 1/2 int |d_r u|^2 + 1/2 int ((m+a_theta)/r)^2 |u|^2 - g/4 int |u|^4,
// all in the measure 2 pi r dr. The radial kinetic term uses midpoint fluxes
// (matching the conservative Laplacian); the final interval is dropped since
// the stored field is clipped at r_max and the true integrand there is
// negligible for decaying fields.
template <class T>
double energy(const std::vector<T>& u, int m, double coupling, const RadialGrid& g) {
    GaugePotentials gp = compute_gauge(u, m, g);
    double kin = 0.0;
    for (int i = 0; i + 2 < g.n; ++i) {
        const double rp = g.r[i] + g.h / 2.0;
        kin += g.h * rp * detail::abs2(u[i + 1] - u[i]) / (g.h * g.h);
    }
    kin *= 0.5 * kTwoPi;
    std::vector<T> xu = covariant_angular(u, gp.a_theta, m, g);
    double mid = 0.0, quart = 0.0;
    for (int i = 0; i < g.n; ++i) {
        mid += g.w[i] * detail::abs2(xu[i]);
        const double d = detail::abs2(u[i]);
        quart += g.w[i] * d * d;
    }
    return kin + 0.5 * kTwoPi * mid - 0.25 * coupling * kTwoPi * quart;
}

template <class T>
std::vector<T> radial_derivative_t(const std::vector<T>& f, double h) {
    const int n = static_cast<int>(f.size());
    std::vector<T> d(n);
    for (int i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    return d;
}

// The same energy rewritten around the covariant derivative:
//   E = 1/2 int |d_r u - ((m+a_theta)/r) u|^2 + (1-g)/4 int |u|^4.
// Agrees with energy() up to quadrature order; at g=1 it exposes why the
// explicit profile has exactly zero energy.
template <class T>
double energy_selfdual_form(const std::vector<T>& u, int m, double coupling, const RadialGrid& g) {
    GaugePotentials gp = compute_gauge(u, m, g);
    std::vector<T> du = radial_derivative_t(u, g.h);
    std::vector<T> xu = covariant_angular(u, gp.a_theta, m, g);
    double t1 = 0.0, quart = 0.0;
    for (int i = 0; i < g.n; ++i) {
        t1 += g.w[i] * detail::abs2(du[i] - xu[i]);
        const double d = detail::abs2(u[i]);
        quart += g.w[i] * d * d;
    }
    return 0.5 * kTwoPi * t1 + 0.25 * (1.0 - coupling) * kTwoPi * quart;
}

template <class Field>
double l4_density(const Field& u, const RadialGrid& g) {
    std::vector<double> dens = density_of(u);
    double acc = 0.0;
    for (int i = 0; i < g.n; ++i) acc += g.w[i] * dens[i] * dens[i];
    return kTwoPi * acc;
}

// Second-moment (virial) functional 1/4 int |x|^2 |u|^2; its second time
// difference along a trajectory equals 4E. Emits a stderr warning when the
// |x|^2-amplified tail carries more than 1e-8 of the integral, since the
// second-moment law is then contaminated by truncation.
template <class Field>
double virial_moment(const Field& u, const RadialGrid& g, bool warn_tail = false) {
    std::vector<double> dens = density_of(u);
    double acc = 0.0, tail = 0.0;
    for (int i = 0; i < g.n; ++i) {
        const double c = g.w[i] * g.r[i] * g.r[i] * dens[i];
        acc += c;
        if (g.r[i] > 0.9 * g.r_max) tail += c;
    }
    if (warn_tail && acc > 0.0 && tail > 1e-8 * acc)
        std::fprintf(stderr, "warning: second moment has %.2e of its weight beyond 0.9 r_max\n",
                     tail / acc);
    return 0.25 * kTwoPi * acc;
}

// Momentum-type companion of the second moment: int Im[conj(u) r d_r u],
// planar measure. Its first time difference along a trajectory equals 4E.
inline double virial_flux(const std::vector<std::complex<double>>& u, const RadialGrid& g) {
    std::vector<std::complex<double>> du = radial_derivative_t(u, g.h);
    double acc = 0.0;
    for (int i = 0; i < g.n; ++i)
        acc += g.w[i] * g.r[i] * std::imag(std::conj(u[i]) * du[i]);
    return kTwoPi * acc;
}

// Localized momentum diagnostic R int psi(r/R) Im[conj(u) d_r u] r dr with a
// fixed smooth cutoff psi: psi(s) = s on [0,1], 3/2 beyond 2, and the unique
// quintic with matching value/slope/curvature on [1,2]. psi' >= 0 on [1,2].
// As R grows past the support of u this approaches virial_flux.
inline double morawetz_weight(double s) {
    if (s <= 1.0) return s;
    if (s >= 2.0) return 1.5;
    const double t = s - 1.0;
    // Hermite data psi(1)=1, psi'(1)=1, psi''(1)=0, psi(2)=3/2, psi'(2)=0,
    // psi''(2)=0 pins the quintic 1 + t - t^3 + t^4/2; its derivative
    // 1 - 3t^2 + 2t^3 decreases monotonically from 1 to 0 on [0,1].
    return 1.0 + t - t * t * t + 0.5 * t * t * t * t;
}

inline double morawetz(const std::vector<std::complex<double>>& u, const RadialGrid& g, double R) {
    if (!(R > 0.0) || R > 0.5 * g.r_max)
        throw BadConfig("morawetz: R must lie in (0, r_max/2]");
    std::vector<std::complex<double>> du = radial_derivative_t(u, g.h);
    double acc = 0.0;
    for (int i = 0; i < g.n; ++i)
        acc += g.w[i] * morawetz_weight(g.r[i] / R) * std::imag(std::conj(u[i]) * du[i]);
    return kTwoPi * R * acc;
}

struct ConservedReport {
    double t = 0.0;
    double mass = 0.0;
    double energy = 0.0;
    double energy_sd = 0.0;
    double l4 = 0.0;
    double virial_v = 0.0;
    double virial_dv = 0.0;
};

inline ConservedReport conserved_report(const RadialField& f, double t) {
    ConservedReport rep;
    rep.t = t;
    rep.mass = mass(f.u, f.grid);
    rep.energy = energy(f.u, f.m, f.g, f.grid);
    rep.energy_sd = energy_selfdual_form(f.u, f.m, f.g, f.grid);
    rep.l4 = l4_density(f.u, f.grid);
    rep.virial_v = virial_moment(f.u, f.grid);
    rep.virial_dv = virial_flux(f.u, f.grid);
    return rep;
}

template <class T>
double l2_norm(const std::vector<T>& u, const RadialGrid& g) {
    double acc = 0.0;
    for (int i = 0; i < g.n; ++i) acc += g.w[i] * detail::abs2(u[i]);
    return std::sqrt(kTwoPi * acc);
}

}  // namespace css
