#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "css/errors.hpp"

namespace css {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Uniform radial grid on [0, r_max] with n nodes, r_i = i*h.
//
// Two quadrature weight sets, both for integrals in the measure r dr:
//   w  : trapezoid weights, used by the cumulative/tail gauge integrals and the
//        energy; they make the discrete energy gradient match the standing-wave
//        residual exactly.
//   cw : cell weights (midpoint cells), used by mass(); this is the quadrature
//        the Crank-Nicolson step conserves to round-off. Identical to w except
//        at the origin, where the cell [0, h/2] contributes h^2/8.
struct RadialGrid {
    int n = 0;
    double r_max = 0.0;
    double h = 0.0;
    std::vector<double> r;
    std::vector<double> w;
    std::vector<double> cw;
};

inline RadialGrid make_grid(int n, double r_max) {
    if (n < 8) throw GridTooCoarse("make_grid: need at least 8 nodes, got " + std::to_string(n));
    if (!(r_max > 0.0)) throw BadConfig("make_grid: r_max must be positive");
    RadialGrid g;
    g.n = n;
    g.r_max = r_max;
    g.h = r_max / (n - 1);
    g.r.resize(n);
    g.w.resize(n);
    g.cw.resize(n);
    for (int i = 0; i < n; ++i) {
        g.r[i] = i * g.h;
        g.w[i] = g.h * g.r[i];
    }
    g.w[0] = 0.0;
    g.w[n - 1] *= 0.5;
    g.cw = g.w;
    g.cw[0] = g.h * g.h / 8.0;
    return g;
}

// Complex radial field in the equivariant ansatz u(x) = u(r) e^{im theta},
// together with the coupling constant g it is meant to be evolved with.
struct RadialField {
    int m = 0;
    double g = 1.0;
    RadialGrid grid;
    std::vector<std::complex<double>> u;
};

inline bool same_grid(const RadialGrid& a, const RadialGrid& b) {
    return a.n == b.n && a.r_max == b.r_max;
}

inline bool finite(const std::vector<std::complex<double>>& u) {
    for (const auto& z : u)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

}  // namespace css
