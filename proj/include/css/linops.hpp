#pragma once

#include <complex>
#include <vector>

#include "css/grid.hpp"
#include "css/soliton.hpp"

namespace css {

// Linearization of the standing-wave energy around a profile q. The operator
//   (L_q f)(r) = f'(r) - ((m + a_theta[q])/r) f(r) + (P[q f](r)/r) q(r),
// with P the cumulative integral int_0^r q f s ds, acts on the real and
// imaginary parts separately (it is real-linear only).
std::vector<double> apply_linearized(const std::vector<double>& f, const std::vector<double>& q,
                                     const std::vector<double>& a_theta, int m,
                                     const RadialGrid& grid);
std::vector<std::complex<double>> apply_linearized(const std::vector<std::complex<double>>& f,
                                                   const std::vector<double>& q,
                                                   const std::vector<double>& a_theta, int m,
                                                   const RadialGrid& grid);

// Quadratic form ||L_q f||^2 + 3(1-g) int q^2 f^2 on real directions.
double coercivity_form(const std::vector<double>& f, const SolitonProfile& p);

// Cubic correction that the second-order energy expansion also carries:
//   X(f) = <B_q, 2 (P[q f]/r) f + (S[f]/r) q>,  S[f] = int_0^r f^2 s ds,
// where B_q = q' - ((m+a_theta)/r) q is the self-duality defect of q. For the
// g=1 profile B_q = 0 and X vanishes identically.
double quadratic_defect_term(const std::vector<double>& f, const SolitonProfile& p);

struct LinearizedSetup {
    SolitonProfile profile;      // on the working (possibly downsampled) grid
    double lambda_min = 0.0;
    double lambda_min_projected = 0.0;  // minimum after removing the ground direction
    double transversality = 0.0;        // <q + r q', psi>, both factors unit-normalized
    double transversality_raw = 0.0;    // same pairing with psi of unit weighted norm
    std::vector<double> psi;            // ground eigenvector, unit weighted L2 norm
    std::vector<double> eigenvalues;    // full generalized spectrum, ascending
};

// Assembles the generalized symmetric eigenproblem of the coercivity form in
// the weighted L2 metric on interior nodes, solves it densely, and fixes the
// sign of the ground eigenvector so the transversality pairing is positive.
// Profiles on grids beyond the dense limit are downsampled first, by striding
// when the interval count divides cleanly and by spline resampling otherwise.
LinearizedSetup build_setup(const SolitonProfile& p);

// The scaling direction q + r dq/dr entering the transversality pairing.
std::vector<double> scaling_direction(const std::vector<double>& q, const RadialGrid& grid);

enum class ExpansionModel {
    kQuadraticForm,      // alpha/2 ||eps||^2 + 1/2 coercivity_form
    kWithDefectTerm,     // adds 1/2 X(eps)
    kMiscoefficient,     // control: 3(1-g) replaced by 2(1-g)
};

struct ExpansionCheck {
    std::vector<double> amplitudes;
    std::vector<std::vector<double>> remainders;  // per direction, per amplitude
    std::vector<double> slopes;                   // log-log fit per direction
    bool degenerate = false;                      // all remainders below 1e-14
};

// Expands the energy of the mass-renormalized perturbation q + a*dir around
// E(q) and fits the order of the remainder against the requested quadratic
// model. Directions are fixed random bump combinations, unit mass.
ExpansionCheck energy_expansion_check(const SolitonProfile& p, ExpansionModel model, int n_dirs,
                                      unsigned long long seed);

enum class FitMode { kNearest, kOrthogonal };

// Decomposition u(x) = e^{-i gamma} lambda^{-1} (q + eps)(x / lambda), i.e.
//   eps(y) = lambda e^{i gamma} u(lambda y) - q(y)  (cubic-spline sampling).
// kNearest minimizes ||eps|| by Gauss-Newton; kOrthogonal solves the two
// constraints <Re eps, psi> = <Im eps, psi> = 0 by a 2x2 Newton seeded from
// the nearest fit.
struct ModulationFrame {
    double lambda = 1.0;
    double gamma = 0.0;  // reduced to (-pi, pi]
    std::vector<std::complex<double>> eps;
    double eps_norm = 0.0;
    double constraint_norm = 0.0;  // |<eps,psi>| + |<eps,ipsi>| (orthogonal mode)
    int iterations = 0;
};

ModulationFrame fit_modulation(const std::vector<std::complex<double>>& u,
                               const LinearizedSetup& setup, FitMode mode, double lambda_seed = 1.0,
                               double gamma_seed = 0.0);

// Reconstructs u from a frame; inverse of the decomposition up to spline error.
std::vector<std::complex<double>> reconstruct_from_frame(const ModulationFrame& frame,
                                                         const SolitonProfile& p);

}  // namespace css
