#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "css/errors.hpp"
#include "css/evolve.hpp"
#include "css/functionals.hpp"
#include "css/gauge.hpp"
#include "css/grid.hpp"
#include "css/io.hpp"
#include "css/linops.hpp"
#include "css/soliton.hpp"
#include "css/study.hpp"

namespace {

using namespace css;

void write_text(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw BadFieldFile("cannot open '" + path + "' for writing");
    out << body;
    if (!out.good()) throw BadFieldFile("cannot write '" + path + "'");
}

// Rebuilds a standing-wave profile from a saved field file; the stored alpha
// metadata pins the frequency, everything else is recomputed from the samples.
SolitonProfile profile_from_file(const std::string& path) {
    FieldFile ff = load_field(path);
    SolitonProfile p;
    p.m = ff.field.m;
    p.g = ff.field.g;
    p.grid = ff.field.grid;
    p.q.resize(p.grid.n);
    double worst_im = 0.0;
    for (int i = 0; i < p.grid.n; ++i) {
        p.q[i] = ff.field.u[i].real();
        worst_im = std::max(worst_im, std::abs(ff.field.u[i].imag()));
    }
    if (worst_im > 1e-9)
        throw BadFieldFile(path + ": profile must be real, found |im_u| up to " +
                           format_full(worst_im));
    p.alpha = p.g == 1.0 ? kv_double_or(ff.meta, "alpha", 0.0) : kv_double(ff.meta, "alpha");
    p.charge = mass(p.q, p.grid);
    p.residual = residual_norm(standing_wave_residual(p.q, p.m, p.g, p.alpha, p.grid), p.grid);
    p.strategy = kv_string_or(ff.meta, "strategy", "loaded");
    return p;
}

struct SolitonArgs {
    int m = 1;
    double g = 1.5;
    double alpha = 1.0;
    int n = 1024;
    double r_max = 16.0;
    std::string out;
    SolveOptions opts;
};

int cmd_soliton(const SolitonArgs& a) {
    SolitonProfile p = solve_standing_wave(a.m, a.g, a.alpha, a.n, a.r_max, a.opts);
    if (!a.out.empty()) {
        std::map<std::string, std::string> meta{
            {"alpha", format_full(p.alpha)},
            {"charge", format_full(p.charge)},
            {"residual", format_full(p.residual)},
            {"newton_iterations", std::to_string(p.newton_iterations)},
            {"strategy", p.strategy},
        };
        save_profile(a.out, p.q, p.m, p.g, p.grid, meta);
    }
    std::printf("m=%d g=%g alpha=%g n=%d r_max=%g\n", p.m, p.g, p.alpha, p.grid.n, p.grid.r_max);
    std::printf("charge=%.12g residual=%.3e iterations=%d strategy=%s\n", p.charge, p.residual,
                p.newton_iterations, p.strategy.c_str());
    if (!a.out.empty()) std::printf("profile written to %s\n", a.out.c_str());
    return 0;
}

struct GaugeArgs {
    std::string in;
    std::string out;
};

int cmd_gauge(const GaugeArgs& a) {
    FieldFile ff = load_field(a.in);
    GaugePotentials gp = compute_gauge(ff.field.u, ff.field.m, ff.field.grid);
    std::string csv = "r,a_theta,a_zero\n";
    for (int i = 0; i < ff.field.grid.n; ++i)
        csv += format_full(ff.field.grid.r[i]) + "," + format_full(gp.a_theta[i]) + "," +
               format_full(gp.a_zero[i]) + "\n";
    if (a.out.empty())
        std::fputs(csv.c_str(), stdout);
    else
        write_text(a.out, csv);
    return 0;
}

struct EvolveArgs {
    std::string init;
    std::string out_dir;
    std::string profile;
    double dt = 1e-4;
    double t_end = 1.0;
    int sample_every = 100;
    bool track = false;
    double lambda_floor = 8.0;
};

int cmd_evolve(const EvolveArgs& a) {
    FieldFile ff = load_field(a.init);
    const RadialField& f = ff.field;

    LinearizedSetup setup;
    if (a.track) {
        SolitonProfile ref = a.profile.empty()
                                 ? solve_standing_wave(f.m, f.g, f.g == 1.0 ? 0.0 : 1.0,
                                                       f.grid.n, f.grid.r_max)
                                 : profile_from_file(a.profile);
        setup = build_setup(ref);
    }

    EvolutionConfig ec;
    ec.dt = a.dt;
    ec.t_end = a.t_end;
    ec.sample_every = a.sample_every;
    ec.track = a.track;
    ec.lambda_floor_factor = a.lambda_floor;
    Trajectory tr = evolve(f, ec, a.track ? &setup : nullptr);

    std::filesystem::create_directories(a.out_dir);
    std::string report = conserved_csv_header();
    if (a.track) report += ",lambda,gamma,eps_norm";
    report += "\n";
    for (size_t k = 0; k < tr.reports.size(); ++k) {
        report += conserved_csv_row(tr.reports[k]);
        if (a.track) {
            if (k < tr.modulation.size())
                report += "," + format_full(tr.modulation[k].lambda) + "," +
                          format_full(tr.modulation[k].gamma) + "," +
                          format_full(tr.modulation[k].eps_norm);
            else
                report += ",,,";
        }
        report += "\n";
    }
    write_text(a.out_dir + "/report.csv", report);

    for (size_t k = 0; k < tr.states.size(); ++k) {
        char name[32];
        std::snprintf(name, sizeof name, "state_%06zu.csv", k);
        RadialField snap{f.m, f.g, f.grid, tr.states[k]};
        save_field(a.out_dir + "/" + std::string(name), snap,
                   {{"t", format_full(tr.times[k])}, {"sample", std::to_string(k)}});
    }

    std::string meta;
    meta += "init=" + a.init + "\n";
    meta += "dt=" + format_full(a.dt) + "\n";
    meta += "t_end=" + format_full(a.t_end) + "\n";
    meta += "sample_every=" + std::to_string(a.sample_every) + "\n";
    meta += std::string("track=") + (a.track ? "1" : "0") + "\n";
    meta += "samples=" + std::to_string(tr.states.size()) + "\n";
    meta += "stop_reason=" + tr.stop_reason + "\n";
    meta += std::string("truncated=") + (tr.truncated ? "1" : "0") + "\n";
    meta += "dt_spectral_radius=" + format_full(tr.dt_spectral_radius) + "\n";
    meta += "max_step_mass_drift=" + format_full(tr.max_step_mass_drift) + "\n";
    meta += std::string("code_version=") + kCodeVersion + "\n";
    write_text(a.out_dir + "/meta", meta);

    std::printf("integrated to t=%g, %zu samples, max step mass drift %.3e\n",
                tr.times.empty() ? 0.0 : tr.times.back(), tr.states.size(),
                tr.max_step_mass_drift);
    std::printf("stop: %s\n", tr.stop_reason.c_str());
    std::printf("trajectory written to %s\n", a.out_dir.c_str());
    return tr.truncated ? 1 : 0;
}

struct SpectrumArgs {
    std::string profile;
    std::string out;
    std::string out_psi;
};

int cmd_spectrum(const SpectrumArgs& a) {
    SolitonProfile p = profile_from_file(a.profile);
    LinearizedSetup setup = build_setup(p);
    std::string csv = "lambda_min,lambda_min_projected,transversality,transversality_raw\n";
    csv += format_full(setup.lambda_min) + "," + format_full(setup.lambda_min_projected) + "," +
           format_full(setup.transversality) + "," + format_full(setup.transversality_raw) + "\n";
    if (a.out.empty())
        std::fputs(csv.c_str(), stdout);
    else
        write_text(a.out, csv);
    if (!a.out_psi.empty()) {
        const SolitonProfile& wp = setup.profile;
        save_profile(a.out_psi, setup.psi, wp.m, wp.g, wp.grid,
                     {{"alpha", format_full(wp.alpha)},
                      {"content", "ground_eigenvector"},
                      {"lambda_min", format_full(setup.lambda_min)}});
    }
    return 0;
}

struct ModfitArgs {
    std::string state;
    std::string profile;
    std::string mode = "orthogonal";
    double lambda_seed = 1.0;
    double gamma_seed = 0.0;
};

int cmd_modfit(const ModfitArgs& a) {
    FieldFile ff = load_field(a.state);
    SolitonProfile p = profile_from_file(a.profile);
    if (!same_grid(ff.field.grid, p.grid))
        throw BadConfig("modfit: state and profile grids differ");
    LinearizedSetup setup = build_setup(p);
    const FitMode mode = a.mode == "nearest" ? FitMode::kNearest : FitMode::kOrthogonal;
    ModulationFrame frame = fit_modulation(ff.field.u, setup, mode, a.lambda_seed, a.gamma_seed);
    std::string csv = "lambda,gamma,eps_norm,constraint_norm,iterations\n";
    csv += format_full(frame.lambda) + "," + format_full(frame.gamma) + "," +
           format_full(frame.eps_norm) + "," + format_full(frame.constraint_norm) + "," +
           std::to_string(frame.iterations) + "\n";
    std::fputs(csv.c_str(), stdout);
    return 0;
}

struct DiagnoseArgs {
    std::string state;
    double t = 0.0;
    bool t_set = false;
    double morawetz_R = 0.0;
};

int cmd_diagnose(const DiagnoseArgs& a) {
    FieldFile ff = load_field(a.state);
    const double t = a.t_set ? a.t : kv_double_or(ff.meta, "t", 0.0);
    const double R = a.morawetz_R > 0.0 ? a.morawetz_R : 0.25 * ff.field.grid.r_max;
    ConservedReport rep = conserved_report(ff.field, t);
    const double mor = morawetz(ff.field.u, ff.field.grid, R);
    std::string csv = conserved_csv_header() + ",morawetz\n";
    csv += conserved_csv_row(rep) + "," + format_full(mor) + "\n";
    std::fputs(csv.c_str(), stdout);
    return 0;
}

int cmd_study(const std::string& config_path) {
    StudyConfig cfg = parse_study_config(config_path);
    const int failed = run_study(cfg);
    if (failed == 0)
        std::printf("study %s: all cells passed; results in %s\n", cfg.kind.c_str(),
                    cfg.out_dir.c_str());
    else
        std::printf("study %s: %d cells failed; results in %s\n", cfg.kind.c_str(), failed,
                    cfg.out_dir.c_str());
    return failed > 0 ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"radial laboratory for equivariant Chern-Simons-Schrodinger dynamics"};
    app.require_subcommand(1);
    int status = 0;

    SolitonArgs sa;
    CLI::App* soliton = app.add_subcommand("soliton", "solve a standing-wave profile");
    soliton->add_option("--m", sa.m, "equivariance index (>= 0)");
    soliton->add_option("--g", sa.g, "coupling (>= 1)");
    soliton->add_option("--alpha", sa.alpha, "frequency (0 exactly when g = 1)");
    soliton->add_option("--n", sa.n, "grid nodes");
    soliton->add_option("--r-max", sa.r_max, "grid extent");
    soliton->add_option("--out", sa.out, "profile output path");
    soliton->add_option("--max-newton", sa.opts.max_newton, "Newton iteration cap");
    soliton->add_option("--tol", sa.opts.tol, "residual tolerance");
    soliton->callback([&] { status = cmd_soliton(sa); });

    GaugeArgs ga;
    CLI::App* gauge = app.add_subcommand("gauge", "dump the gauge potentials of a field");
    gauge->add_option("--in", ga.in, "field file")->required();
    gauge->add_option("--out", ga.out, "output CSV (stdout when omitted)");
    gauge->callback([&] { status = cmd_gauge(ga); });

    EvolveArgs ea;
    CLI::App* evo = app.add_subcommand("evolve", "integrate a field in time");
    evo->add_option("--init", ea.init, "initial state file")->required();
    evo->add_option("--dt", ea.dt, "time step (negative reverses time)");
    evo->add_option("--t-end", ea.t_end, "final time, an integer number of steps");
    evo->add_option("--sample-every", ea.sample_every, "steps between samples");
    evo->add_flag("--track", ea.track, "fit the modulation frame at each sample");
    evo->add_option("--profile", ea.profile,
                    "reference profile for --track (solved at the state's (m,g) when omitted)");
    evo->add_option("--lambda-floor", ea.lambda_floor,
                    "stop once the fitted scale drops below this many grid spacings");
    evo->add_option("--out", ea.out_dir, "trajectory directory")->required();
    evo->callback([&] { status = cmd_evolve(ea); });

    SpectrumArgs pa;
    CLI::App* spec = app.add_subcommand("spectrum", "linearized spectrum at a profile");
    spec->add_option("--profile", pa.profile, "profile file")->required();
    spec->add_option("--out", pa.out, "output CSV (stdout when omitted)");
    spec->add_option("--out-psi", pa.out_psi, "write the ground eigenvector as a field file");
    spec->callback([&] { status = cmd_spectrum(pa); });

    ModfitArgs ma;
    CLI::App* mod = app.add_subcommand("modfit", "fit the modulation frame of a state");
    mod->add_option("--state", ma.state, "state file")->required();
    mod->add_option("--profile", ma.profile, "profile file")->required();
    mod->add_option("--mode", ma.mode, "nearest | orthogonal")
        ->check(CLI::IsMember({"nearest", "orthogonal"}));
    mod->add_option("--lambda-seed", ma.lambda_seed, "scale seed");
    mod->add_option("--gamma-seed", ma.gamma_seed, "phase seed");
    mod->callback([&] { status = cmd_modfit(ma); });

    DiagnoseArgs da;
    CLI::App* diag = app.add_subcommand("diagnose", "conserved quantities of a state");
    diag->add_option("--state", da.state, "state file")->required();
    diag->add_option("--t", da.t, "time label (defaults to the file's t metadata)")
        ->each([&](const std::string&) { da.t_set = true; });
    diag->add_option("--morawetz-R", da.morawetz_R, "localization radius (default r_max/4)");
    diag->callback([&] { status = cmd_diagnose(da); });

    std::string study_config;
    CLI::App* study = app.add_subcommand("study", "run a batch study from a config file");
    study->add_option("--config", study_config, "study config (key=value lines)")->required();
    study->callback([&] { status = cmd_study(study_config); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    } catch (const BadConfig& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const BadFieldFile& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return status;
}
