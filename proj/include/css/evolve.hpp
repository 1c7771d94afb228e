#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "css/functionals.hpp"
#include "css/grid.hpp"
#include "css/linops.hpp"
#include "css/soliton.hpp"
#include "css/tridiag.hpp"

namespace css {

struct EvolutionConfig {
    double dt = 1e-4;             // may be negative (time reversal)
    double t_end = 1.0;           // same sign as dt
    int sample_every = 1;         // >= 1, in steps
    double linear_solver_tol = 1e-12;
    bool track = false;           // modulation tracking against a profile
    double lambda_floor_factor = 8.0;  // stop blowup runs once lambda < factor*h
};

struct TrackSample {
    double t = 0.0;
    double lambda = 1.0;
    double gamma = 0.0;
    double eps_norm = 0.0;
};

struct Trajectory {
    std::vector<double> times;                       // sampled, strictly increasing in |t|
    std::vector<std::vector<std::complex<double>>> states;
    std::vector<ConservedReport> reports;
    std::vector<TrackSample> modulation;             // filled when tracking
    std::string stop_reason = "completed";
    bool truncated = false;
    double dt_spectral_radius = 0.0;                 // |dt| * est. spectral radius of L
    double max_step_mass_drift = 0.0;                // worst per-step relative mass change
};

// One split step: half nonlinear phase rotation with the potential recomputed
// from the current state, a Crank-Nicolson linear substep (unitary in the cell
// quadrature), then the second half phase. The workspace caches the
// factorization; it is rebuilt when dt or the grid changes.
class Stepper {
  public:
    Stepper(int m, double g, const RadialGrid& grid, double dt);

    void step(std::vector<std::complex<double>>& u);

    double dt() const { return dt_; }
    double last_mass_drift() const { return last_drift_; }
    double spectral_radius_estimate() const { return rho_; }

  private:
    int m_;
    double g_;
    RadialGrid grid_;
    double dt_;
    double rho_ = 0.0;
    double last_drift_ = 0.0;
    int lo_;                     // first evolving node
    FluxLaplacian lap_;
    TridiagLUz lu_;              // I - i dt/2 L on evolving nodes
    std::vector<std::complex<double>> plus_lo_, plus_di_, plus_up_;
    std::vector<std::complex<double>> rhs_;
};

// Fixed-step evolution with sampling. Tracking fits the modulation frame at
// each sample, warm-started from the previous one; a fit failure or a fitted
// scale below lambda_floor_factor*h truncates the trajectory with the reason
// recorded and the last healthy state kept.
Trajectory evolve(const RadialField& init, const EvolutionConfig& cfg,
                  const LinearizedSetup* track_setup = nullptr);

// Mass-invariant rescale u -> lambda u(lambda x) by cubic spline, onto the
// same grid. Scales much above the resolvable band trigger a stderr warning.
RadialField rescale(const RadialField& f, double lambda, double soliton_scale = 1.0);

// Time-inversion image v(x) = (1/t) conj(u(x/t)) e^{i |x|^2 / (4t)} of a
// snapshot; the caller owns the time reparametrization. t = 0 is rejected.
RadialField pseudoconformal(const RadialField& f, double t);

// Exact blowup family built from a standing-wave profile: at time t < T the
// state is (1/(T-t)) q(r/(T-t)) e^{-i r^2/(4(T-t))} e^{i alpha/(T-t)}, which
// concentrates with scale lambda(t) = T - t. Sampled on the profile's grid.
RadialField pc_blowup_reference(const SolitonProfile& p, double T, double t);

// Least-squares fit of a state against the two-parameter blowup family
//   v(r) = (1/lambda) e^{i gamma} q(r/lambda) e^{-i r^2/(4 lambda)},
// Gauss-Newton from the given seed. Returns (lambda, gamma).
std::pair<double, double> fit_blowup_family(const std::vector<std::complex<double>>& u,
                                            const SolitonProfile& p, double lambda_seed,
                                            double gamma_seed);

}  // namespace css
