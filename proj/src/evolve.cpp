#include "css/evolve.hpp"

#include <cmath>
#include <cstdio>
#include <utility>

#include "css/errors.hpp"
#include "css/gauge.hpp"
#include "css/spline.hpp"

namespace css {

Stepper::Stepper(int m, double g, const RadialGrid& grid, double dt)
    : m_(m), g_(g), grid_(grid), dt_(dt) {
    if (dt == 0.0) throw BadConfig("Stepper: dt must be nonzero");
    lap_ = make_flux_laplacian(m, grid);
    lo_ = lap_.active_begin();
    const int n = grid.n;
    const int na = (n - 1) - lo_;
    std::vector<std::complex<double>> dl(na), d(na), du(na);
    plus_lo_.assign(na, 0.0);
    plus_di_.assign(na, 0.0);
    plus_up_.assign(na, 0.0);
    const std::complex<double> z(0.0, 0.5 * dt);
    for (int k = 0; k < na; ++k) {
        const int i = lo_ + k;
        const std::complex<double> zl = z * lap_.lo[i];
        const std::complex<double> zd = z * lap_.di[i];
        const std::complex<double> zu = z * lap_.up[i];
        dl[k] = (k == 0) ? std::complex<double>(0.0) : -zl;
        d[k] = 1.0 - zd;
        du[k] = (k + 1 == na) ? std::complex<double>(0.0) : -zu;
        plus_lo_[k] = (k == 0) ? std::complex<double>(0.0) : zl;
        plus_di_[k] = 1.0 + zd;
        plus_up_[k] = (k + 1 == na) ? std::complex<double>(0.0) : zu;
    }
    lu_.factor(std::move(dl), std::move(d), std::move(du));
    rhs_.resize(na);
    rho_ = std::abs(dt) * (4.0 + double(m) * m) / (grid.h * grid.h);
}

void Stepper::step(std::vector<std::complex<double>>& u) {
    const int n = grid_.n;
    const double mass_before = mass(u, grid_);
    PotentialData pd = compute_potential(u, m_, g_, grid_);
    const double hdt = 0.5 * dt_;
    for (int i = 0; i < n; ++i) u[i] *= std::polar(1.0, -hdt * pd.v[i]);
    const int na = (n - 1) - lo_;
    for (int k = 0; k < na; ++k) {
        const int i = lo_ + k;
        std::complex<double> acc = plus_di_[k] * u[i];
        if (k > 0) acc += plus_lo_[k] * u[i - 1];
        if (k + 1 < na) acc += plus_up_[k] * u[i + 1];
        rhs_[k] = acc;
    }
    lu_.solve(rhs_);
    for (int k = 0; k < na; ++k) u[lo_ + k] = rhs_[k];
    pd = compute_potential(u, m_, g_, grid_);
    for (int i = 0; i < n; ++i) u[i] *= std::polar(1.0, -hdt * pd.v[i]);
    if (!finite(u)) throw NonFinite("evolution produced a non-finite state");
    const double mass_after = mass(u, grid_);
    last_drift_ = std::abs(mass_after - mass_before) / std::max(mass_before, 1e-300);
}

Trajectory evolve(const RadialField& init, const EvolutionConfig& cfg,
                  const LinearizedSetup* track_setup) {
    const RadialGrid& grid = init.grid;
    if (cfg.dt == 0.0) throw BadConfig("evolve: dt must be nonzero");
    if (cfg.sample_every < 1) throw BadConfig("evolve: sample_every must be >= 1");
    const double ratio = cfg.t_end / cfg.dt;
    if (!(ratio > 0.0)) throw BadConfig("evolve: t_end and dt must have the same sign");
    const long long nsteps = std::llround(ratio);
    if (nsteps < 1 || std::abs(ratio - double(nsteps)) > 1e-9 * std::max(1.0, std::abs(ratio)))
        throw BadConfig("evolve: t_end must be an integer number of dt steps");
    if (cfg.track && track_setup == nullptr)
        throw BadConfig("evolve: tracking requested without a linearized setup");
    if (cfg.track && !same_grid(track_setup->profile.grid, grid))
        throw BadConfig("evolve: tracking setup grid does not match the state grid");
    if (std::abs(cfg.dt) > grid.h)
        std::fprintf(stderr, "warning: dt=%.3e exceeds h=%.3e; splitting error may dominate\n",
                     std::abs(cfg.dt), grid.h);

    Trajectory traj;
    Stepper stepper(init.m, init.g, grid, cfg.dt);
    traj.dt_spectral_radius = stepper.spectral_radius_estimate();

    std::vector<std::complex<double>> u = init.u;
    u[grid.n - 1] = 0.0;
    if (init.m != 0) u[0] = 0.0;

    RadialField f = init;
    double lam_seed = 1.0, gam_seed = 0.0;
    auto sample = [&](double t, const std::vector<std::complex<double>>& state) -> bool {
        f.u = state;
        traj.times.push_back(t);
        traj.states.push_back(state);
        traj.reports.push_back(conserved_report(f, t));
        if (cfg.track) {
            try {
                ModulationFrame fr = fit_modulation(state, *track_setup, FitMode::kOrthogonal,
                                                    lam_seed, gam_seed);
                traj.modulation.push_back({t, fr.lambda, fr.gamma, fr.eps_norm});
                lam_seed = fr.lambda;
                gam_seed = fr.gamma;
                if (fr.lambda < cfg.lambda_floor_factor * grid.h) {
                    traj.stop_reason = "fitted scale below the resolution floor";
                    traj.truncated = true;
                    return false;
                }
            } catch (const BasinEscape& e) {
                traj.stop_reason = std::string("modulation fit failed: ") + e.what();
                traj.truncated = true;
                return false;
            }
        }
        return true;
    };

    if (!sample(0.0, u)) return traj;
    for (long long k = 0; k < nsteps; ++k) {
        try {
            stepper.step(u);
        } catch (const NonFinite&) {
            traj.stop_reason = "non-finite state";
            traj.truncated = true;
            return traj;
        }
        traj.max_step_mass_drift = std::max(traj.max_step_mass_drift, stepper.last_mass_drift());
        if ((k + 1) % cfg.sample_every == 0 || k + 1 == nsteps) {
            if (!sample(double(k + 1) * cfg.dt, u)) return traj;
        }
    }
    return traj;
}

RadialField rescale(const RadialField& f, double lambda, double soliton_scale) {
    if (!(lambda > 0.0)) throw BadConfig("rescale: lambda must be positive");
    const RadialGrid& grid = f.grid;
    const int n = grid.n;
    const double resolvable = soliton_scale * (n - 1) / (32.0 * grid.r_max);
    if (lambda > resolvable)
        std::fprintf(stderr,
                     "warning: rescale by %.3e concentrates features below 32 cells "
                     "(resolvable up to %.3e)\n",
                     lambda, resolvable);
    std::vector<double> ur(n), ui(n);
    for (int i = 0; i < n; ++i) {
        ur[i] = f.u[i].real();
        ui[i] = f.u[i].imag();
    }
    CubicSpline spr(ur, grid.h), spi(ui, grid.h);
    RadialField out = f;
    for (int i = 0; i < n; ++i) {
        const double x = lambda * grid.r[i];
        out.u[i] = lambda * std::complex<double>(spr(x), spi(x));
    }
    return out;
}

RadialField pseudoconformal(const RadialField& f, double t) {
    if (t == 0.0) throw BadConfig("pseudoconformal: t must be nonzero");
    const RadialGrid& grid = f.grid;
    const int n = grid.n;
    std::vector<double> ur(n), ui(n);
    for (int i = 0; i < n; ++i) {
        ur[i] = f.u[i].real();
        ui[i] = f.u[i].imag();
    }
    CubicSpline spr(ur, grid.h), spi(ui, grid.h);
    const double at = std::abs(t);
    RadialField out = f;
    for (int i = 0; i < n; ++i) {
        const double x = grid.r[i] / at;
        const std::complex<double> uu(spr(x), spi(x));
        out.u[i] =
            (1.0 / t) * std::conj(uu) * std::polar(1.0, grid.r[i] * grid.r[i] / (4.0 * t));
    }
    return out;
}

RadialField pc_blowup_reference(const SolitonProfile& p, double T, double t) {
    const double lam = T - t;
    if (!(lam > 0.0)) throw BadConfig("pc_blowup_reference: need t < T");
    const RadialGrid& grid = p.grid;
    CubicSpline sp(p.q, grid.h);
    RadialField out;
    out.m = p.m;
    out.g = p.g;
    out.grid = grid;
    out.u.resize(grid.n);
    for (int i = 0; i < grid.n; ++i) {
        const double r = grid.r[i];
        const double phase = -r * r / (4.0 * lam) + p.alpha / lam;
        out.u[i] = (sp(r / lam) / lam) * std::polar(1.0, phase);
    }
    return out;
}

std::pair<double, double> fit_blowup_family(const std::vector<std::complex<double>>& u,
                                            const SolitonProfile& p, double lambda_seed,
                                            double gamma_seed) {
    const RadialGrid& grid = p.grid;
    const int n = grid.n;
    if (static_cast<int>(u.size()) != n)
        throw BadConfig("fit_blowup_family: state length does not match the profile grid");
    if (!(lambda_seed > 0.0)) throw BadConfig("fit_blowup_family: lambda seed must be positive");
    CubicSpline spq(p.q, grid.h);
    auto model = [&](double lam, double gam, std::vector<std::complex<double>>& v) {
        for (int i = 0; i < n; ++i) {
            const double r = grid.r[i];
            v[i] = (spq(r / lam) / lam) * std::polar(1.0, gam - r * r / (4.0 * lam));
        }
    };
    double lam = lambda_seed, gam = gamma_seed;
    std::vector<std::complex<double>> v(n), vp(n);
    for (int it = 0; it < 50; ++it) {
        model(lam, gam, v);
        const double dl = 1e-7 * lam;
        model(lam + dl, gam, vp);
        double a11 = 0.0, a12 = 0.0, a22 = 0.0, b1 = 0.0, b2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const std::complex<double> jl = (vp[i] - v[i]) / dl;
            const std::complex<double> jg = std::complex<double>(0.0, 1.0) * v[i];
            const std::complex<double> R = u[i] - v[i];
            const double wgt = grid.w[i];
            a11 += wgt * std::norm(jl);
            a12 += wgt * (jl.real() * jg.real() + jl.imag() * jg.imag());
            a22 += wgt * std::norm(jg);
            b1 += wgt * (jl.real() * R.real() + jl.imag() * R.imag());
            b2 += wgt * (jg.real() * R.real() + jg.imag() * R.imag());
        }
        const double det = a11 * a22 - a12 * a12;
        if (!(det > 0.0)) break;
        const double dlam = (b1 * a22 - b2 * a12) / det;
        const double dgam = (a11 * b2 - a12 * b1) / det;
        lam += dlam;
        gam += dgam;
        if (!std::isfinite(lam) || !std::isfinite(gam) || !(lam > 0.0))
            throw BasinEscape("blowup-family fit diverged");
        if (std::abs(dlam) / lam + std::abs(dgam) < 1e-13) break;
    }
    return {lam, gam};
}

}  // namespace css
