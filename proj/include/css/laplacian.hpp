#pragma once

#include <vector>

#include "css/grid.hpp"

namespace css {

// Conservative (flux-form) radial Laplacian with the centrifugal term:
//   (L u)_i = (r_{i+1/2}(u_{i+1}-u_i) - r_{i-1/2}(u_i-u_{i-1})) / (h^2 r_i) - (m^2/r_i^2) u_i.
// Its quadratic form against the trapezoid weights reproduces the midpoint-flux
// kinetic energy exactly, which is what makes Newton's residual the exact
// gradient of the discrete energy.
//
// Boundary handling: the outer node is Dirichlet. At the origin, m>=1 fields
// vanish (Dirichlet row), while for m=0 even symmetry across r=0 gives the
// ghost-node row (L u)_0 = 4 (u_1 - u_0)/h^2.
struct FluxLaplacian {
    int m = 0;
    std::vector<double> lo, di, up;

    // First row that the operator actually evolves (0 for m=0, else 1).
    int active_begin() const { return m == 0 ? 0 : 1; }
};

inline FluxLaplacian make_flux_laplacian(int m, const RadialGrid& g) {
    FluxLaplacian L;
    L.m = m;
    const int n = g.n;
    L.lo.assign(n, 0.0);
    L.di.assign(n, 0.0);
    L.up.assign(n, 0.0);
    for (int i = 1; i + 1 < n; ++i) {
        const double ri = g.r[i];
        const double rp = ri + g.h / 2.0;
        const double rm = ri - g.h / 2.0;
        L.lo[i] = rm / (g.h * g.h * ri);
        L.up[i] = rp / (g.h * g.h * ri);
        L.di[i] = -(rp + rm) / (g.h * g.h * ri) - double(m) * m / (ri * ri);
    }
    if (m == 0) {
        L.di[0] = -4.0 / (g.h * g.h);
        L.up[0] = 4.0 / (g.h * g.h);
    }
    return L;
}

// Applies L; the outer Dirichlet row yields 0. For m>=1 the origin row also
// yields 0 (the input is expected to vanish there).
template <class T>
std::vector<T> apply_laplacian(const FluxLaplacian& L, const std::vector<T>& u) {
    const int n = static_cast<int>(u.size());
    std::vector<T> out(n, T(0));
    for (int i = 0; i + 1 < n; ++i) {
        out[i] = L.di[i] * u[i];
        if (i > 0) out[i] += L.lo[i] * u[i - 1];
        out[i] += L.up[i] * u[i + 1];
    }
    if (L.m != 0) out[0] = T(0);
    return out;
}

}  // namespace css
