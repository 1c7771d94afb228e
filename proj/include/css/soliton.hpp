#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "css/grid.hpp"
#include "css/laplacian.hpp"

namespace css {

// Closed-form zero-energy soliton of the g=1 family,
//   Q_m(r) = sqrt(8) (m+1) r^m / (1 + r^{2m+2}),
// together with its gauge potentials.
std::vector<double> selfdual_profile(int m, const RadialGrid& grid);
double selfdual_value(int m, double r);
double selfdual_charge(int m);  // 8 pi (m+1)
std::vector<double> selfdual_a_theta_exact(int m, const RadialGrid& grid);

// Standing-wave equation residual F(q) = L q - (V[q] + alpha) q with the
// Dirichlet rows zeroed (outer node always, origin node for m >= 1).
std::vector<double> standing_wave_residual(const std::vector<double>& q, int m, double g,
                                           double alpha, const RadialGrid& grid);

// Weighted L2 norm of the residual, the convergence measure used throughout.
double residual_norm(const std::vector<double>& f, const RadialGrid& grid);

// Dense Jacobian dF/dq including the nonlocal chain through both gauge
// potentials. O(n^3) assembly; refuses n > 2048.
Eigen::MatrixXd standing_wave_jacobian(const std::vector<double>& q, int m, double g, double alpha,
                                       const RadialGrid& grid);

// Directional derivative dF/dq . v in O(n), used by the matrix-free refinement
// and as a cross-check of the dense assembly.
std::vector<double> standing_wave_jacobian_apply(const std::vector<double>& q,
                                                 const std::vector<double>& v, int m, double g,
                                                 double alpha, const RadialGrid& grid);

struct SolitonProfile {
    int m = 0;
    double g = 1.0;
    double alpha = 0.0;
    RadialGrid grid;
    std::vector<double> q;
    double charge = 0.0;
    double residual = 0.0;                  // weighted L2 norm of F at q
    int newton_iterations = 0;
    std::vector<double> residual_history;   // per accepted Newton iterate
    std::string strategy;                   // which solve path produced q
};

struct SolveOptions {
    int max_newton = 100;
    double tol = 1e-12;            // accept below this
    double stop_floor = 1e-9;      // stagnation above this is GridTooCoarse
    int continuation_steps = 32;
    int continuation_halvings = 4;
    bool allow_fallback = true;
};

// Computes the positive standing-wave profile at (m, g, alpha).
//
// The primary strategy is parameter continuation from the closed-form g=1
// profile in 32 steps with up to 4 step halvings. That path walks through
// small-alpha solitons whose width grows like 1/sqrt(alpha), so on grids with
// r_max too small to hold the early-path profiles it is skipped (the
// obstruction is grid coarseness, not the solver) and a scan-seeded damped
// Newton runs directly at the target: seeds A * s * Q_sd(s r) over a fixed
// (A, s) lattice scaled by sqrt(alpha), best seed polished with a line-searched
// Newton. Couplings below 1.3 are reached by walking g down from 1.5, reusing
// each solution as the next seed.
//
// Grids larger than the dense-Jacobian limit are refined matrix-free: the
// coarse solution is spline-lifted and corrected by Newton-Krylov steps with
// the analytic Jacobian action and a tridiagonal preconditioner.
SolitonProfile solve_standing_wave(int m, double g, double alpha, int n, double r_max,
                                   const SolveOptions& opts = {});

// Minimal blowup charge c_{m,g}: exactly 8 pi (m+1) at g=1, otherwise the
// charge of the alpha=1 soliton (alpha-independent by scaling).
double threshold_charge(int m, double g, int n = 2048, double r_max = 0.0);

// Mass-weighted RMS radius of a profile, the length scale used to express
// resolution cutoffs in soliton units.
double rms_radius(const std::vector<double>& q, const RadialGrid& grid);

// Log-log slope of q over nodes 1..10, the origin vanishing order.
double origin_slope(const std::vector<double>& q, const RadialGrid& grid);

}  // namespace css
