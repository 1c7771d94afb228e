#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "css/grid.hpp"

namespace css {

// Cumulative trapezoid of int_0^{r_i} f(s) s ds.
inline std::vector<double> prefix_integral(const std::vector<double>& f, const RadialGrid& g) {
    const int n = g.n;
    std::vector<double> out(n, 0.0);
    double acc = 0.0;
    for (int i = 1; i < n; ++i) {
        acc += 0.5 * g.h * (f[i - 1] * g.r[i - 1] + f[i] * g.r[i]);
        out[i] = acc;
    }
    return out;
}

// Trapezoid of int_{r_i}^{r_max} f(s)/s ds. When f vanishes at the origin the
// integrand extends by 0 there; otherwise it is linearly extrapolated.
inline std::vector<double> tail_integral(const std::vector<double>& f, const RadialGrid& g) {
    const int n = g.n;
    std::vector<double> integrand(n);
    for (int i = 1; i < n; ++i) integrand[i] = f[i] / g.r[i];
    integrand[0] = (f[0] == 0.0) ? 0.0 : 2.0 * integrand[1] - integrand[2];
    std::vector<double> out(n, 0.0);
    double acc = 0.0;
    for (int i = n - 2; i >= 0; --i) {
        acc += 0.5 * g.h * (integrand[i] + integrand[i + 1]);
        out[i] = acc;
    }
    return out;
}

// Central differences, one-sided second-order at both ends.
inline std::vector<double> radial_derivative(const std::vector<double>& f, double h) {
    const int n = static_cast<int>(f.size());
    std::vector<double> d(n);
    for (int i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    return d;
}

inline std::vector<double> density_of(const std::vector<std::complex<double>>& u) {
    std::vector<double> dens(u.size());
    for (size_t i = 0; i < u.size(); ++i) dens[i] = std::norm(u[i]);
    return dens;
}

inline std::vector<double> density_of(const std::vector<double>& q) {
    std::vector<double> dens(q.size());
    for (size_t i = 0; i < q.size(); ++i) dens[i] = q[i] * q[i];
    return dens;
}

// The two gauge potentials generated by |u|^2. a_theta is the cumulative
// magnetic potential, a_zero the temporal one; a_theta feeds into a_zero
// (the system is triangular, never coupled).
struct GaugePotentials {
    std::vector<double> a_theta;
    std::vector<double> a_zero;
    double source_mass = 0.0;
};

// Takes |u|^2, not u. Fields go through compute_gauge, which squares; keeping
// the two names distinct stops a real-valued profile from being mistaken for
// its own density by overload resolution.
inline GaugePotentials gauge_from_density(const std::vector<double>& dens, int m,
                                          const RadialGrid& g) {
    GaugePotentials gp;
    gp.a_theta = prefix_integral(dens, g);
    for (auto& v : gp.a_theta) v *= -0.5;
    std::vector<double> f(g.n);
    for (int i = 0; i < g.n; ++i) f[i] = (m + gp.a_theta[i]) * dens[i];
    gp.a_zero = tail_integral(f, g);
    for (auto& v : gp.a_zero) v = -v;
    gp.source_mass = -kTwoPi * 2.0 * gp.a_theta[g.n - 1];  // mass = -4 pi a_theta(r_max)
    return gp;
}

template <class Field>
GaugePotentials compute_gauge(const Field& u, int m, const RadialGrid& g) {
    return gauge_from_density(density_of(u), m, g);
}

// ((m + a_theta)/r) u with the origin limit: the coefficient is m/r + O(r), so
// for m=0 the value is 0 and for m=1 it equals u'(0) (one-sided difference);
// for m>=2 equivariant fields vanish to second order and the value is 0.
template <class T>
std::vector<T> covariant_angular(const std::vector<T>& u, const std::vector<double>& a_theta, int m,
                                 const RadialGrid& g) {
    std::vector<T> out(g.n, T(0));
    for (int i = 1; i < g.n; ++i) out[i] = (double(m) + a_theta[i]) / g.r[i] * u[i];
    if (m == 1) out[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * g.h);
    return out;
}

// Potential V with Lambda(u) = V u, the right-hand side of the evolution
// equation: V = (2m a_theta + a_theta^2)/r^2 + a_zero - g |u|^2.
// At the origin a_theta = O(r^2), so the first group vanishes for every m.
struct PotentialData {
    std::vector<double> v;
    GaugePotentials gauge;
};

inline PotentialData potential_from_density(const std::vector<double>& dens, int m, double coupling,
                                            const RadialGrid& g) {
    PotentialData pd;
    pd.gauge = gauge_from_density(dens, m, g);
    pd.v.resize(g.n);
    const auto& at = pd.gauge.a_theta;
    const auto& a0 = pd.gauge.a_zero;
    for (int i = 1; i < g.n; ++i)
        pd.v[i] = (2.0 * m * at[i] + at[i] * at[i]) / (g.r[i] * g.r[i]) + a0[i] - coupling * dens[i];
    pd.v[0] = a0[0] - coupling * dens[0];
    return pd;
}

template <class Field>
PotentialData compute_potential(const Field& u, int m, double coupling, const RadialGrid& g) {
    return potential_from_density(density_of(u), m, coupling, g);
}

// Lambda(u): the full nonlinearity as a field, V[u] u.
inline std::vector<std::complex<double>> apply_nonlinearity(const std::vector<std::complex<double>>& u,
                                                            int m, double coupling,
                                                            const RadialGrid& g) {
    PotentialData pd = compute_potential(u, m, coupling, g);
    std::vector<std::complex<double>> out(g.n);
    for (int i = 0; i < g.n; ++i) out[i] = pd.v[i] * u[i];
    return out;
}

}  // namespace css
