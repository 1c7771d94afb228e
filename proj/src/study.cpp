#include "css/study.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <set>
#include <thread>

#include "css/errors.hpp"
#include "css/evolve.hpp"
#include "css/functionals.hpp"
#include "css/gauge.hpp"
#include "css/grid.hpp"
#include "css/io.hpp"
#include "css/linops.hpp"
#include "css/soliton.hpp"
#include "css/spline.hpp"

namespace css {
namespace {

struct Cell {
    long long m = 0;
    double g = 1.0;
    double alpha = 0.0;
};

struct CellResult {
    std::vector<std::string> rows;
    std::vector<std::string> report_lines;
    bool failed = false;
};

std::string scrub(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    return s;
}

std::string join(const std::vector<std::string>& cols) {
    std::string out;
    for (size_t i = 0; i < cols.size(); ++i) {
        if (i) out += ',';
        out += cols[i];
    }
    return out;
}

std::string pretty(double x) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

std::vector<std::string> provenance(const StudyConfig& cfg) {
    return {std::to_string(cfg.n), format_full(cfg.r_max), format_full(cfg.dt),
            std::to_string(cfg.seed), kCodeVersion};
}

std::string cell_label(const std::string& kind, const Cell& c) {
    std::string s = "m=" + std::to_string(c.m);
    if (kind != "identity-suite") s += " g=" + pretty(c.g);
    if (kind == "spectrum-scan" || kind == "blowup-benchmark") s += " alpha=" + pretty(c.alpha);
    return s;
}

// ---------------------------------------------------------------------------
// identity-suite: closed-form family invariants at the configured resolution.
// Bounds are discretization-level (the sharp versions live in the acceptance
// suite); each row records the measured residual next to its bound.

CellResult identity_cell(const StudyConfig& cfg, const Cell& cell) {
    CellResult res;
    const int m = static_cast<int>(cell.m);
    SolitonProfile p = solve_standing_wave(m, 1.0, 0.0, static_cast<int>(cfg.n), cfg.r_max);
    const RadialGrid& gr = p.grid;
    const std::vector<double>& q = p.q;
    GaugePotentials gp = compute_gauge(q, m, gr);

    double mass_trap = 0.0;
    for (int i = 0; i < gr.n; ++i) mass_trap += gr.w[i] * q[i] * q[i];
    mass_trap *= kTwoPi;
    const double exact = selfdual_charge(m);
    const double tail_rel = 1.0 / (1.0 + std::pow(cfg.r_max, 2.0 * m + 2.0));
    const double at_end = selfdual_a_theta_exact(m, gr).back();
    const double e = energy(q, m, 1.0, gr);
    const double e_sd = energy_selfdual_form(q, m, 1.0, gr);

    std::vector<double> dq = radial_derivative(q, gr.h);
    std::vector<double> xq = covariant_angular(q, gp.a_theta, m, gr);
    double bog = 0.0;
    for (int i = 0; i < gr.n; ++i)
        if (gr.r[i] <= 0.9 * gr.r_max) bog = std::max(bog, std::abs(dq[i] - xq[i]));

    struct Check {
        const char* name;
        double measured;
        double bound;
    };
    const Check checks[] = {
        {"gauge_mass_link", std::abs(gp.source_mass - mass_trap) / mass_trap, 1e-12},
        {"charge_quantization", std::abs(p.charge - exact) / exact, tail_rel + 5e-4},
        {"a_theta_endpoint", std::abs(gp.a_theta[gr.n - 1] - at_end), 5e-3},
        {"energy_zero", std::abs(e), 5e-2},
        {"energy_form_gap", std::abs(e - e_sd), 5e-2},
        {"bogomolny_sup", bog, 5e-2},
        {"origin_slope", std::abs(origin_slope(q, gr) - m), 0.1},
    };
    for (const Check& c : checks) {
        const bool pass = c.measured <= c.bound;
        std::vector<std::string> row{std::to_string(cell.m), c.name, format_full(c.measured),
                                     format_full(c.bound), pass ? "1" : "0"};
        for (const auto& s : provenance(cfg)) row.push_back(s);
        row.emplace_back();
        res.rows.push_back(join(row));
        char line[160];
        std::snprintf(line, sizeof line, "  m=%lld %-20s measured=%-12.3e bound=%-9.1e %s", cell.m,
                      c.name, c.measured, c.bound, pass ? "ok" : "FAIL");
        res.report_lines.emplace_back(line);
        if (!pass) res.failed = true;
    }
    return res;
}

std::string identity_error_row(const StudyConfig& cfg, const Cell& cell, const std::string& msg) {
    std::vector<std::string> row{std::to_string(cell.m), "(suite)", "", "", "0"};
    for (const auto& s : provenance(cfg)) row.push_back(s);
    row.push_back(scrub(msg));
    return join(row);
}

// ---------------------------------------------------------------------------
// soliton-table: threshold charges c_{m,g} with the cross-alpha consistency
// of the charge as a built-in scaling check.

CellResult soliton_cell(const StudyConfig& cfg, const Cell& cell) {
    CellResult res;
    const int m = static_cast<int>(cell.m);
    const int n = static_cast<int>(cfg.n);
    double charge = 0.0, consistency = 0.0, residual = 0.0, e_over_c = 0.0;
    long long iterations = 0;
    std::string strategy;
    if (cell.g == 1.0) {
        SolitonProfile p = solve_standing_wave(m, 1.0, 0.0, n, cfg.r_max);
        charge = p.charge;
        residual = p.residual;
        e_over_c = std::abs(energy(p.q, m, p.g, p.grid)) / p.charge;
        iterations = p.newton_iterations;
        strategy = p.strategy;
    } else {
        for (size_t k = 0; k < cfg.alpha_list.size(); ++k) {
            SolitonProfile p = solve_standing_wave(m, cell.g, cfg.alpha_list[k], n, cfg.r_max);
            if (k == 0) {
                charge = p.charge;
                strategy = p.strategy;
            } else {
                consistency = std::max(consistency, std::abs(p.charge - charge) / charge);
            }
            residual = std::max(residual, p.residual);
            e_over_c = std::max(e_over_c, std::abs(energy(p.q, m, p.g, p.grid)) / p.charge);
            iterations += p.newton_iterations;
        }
    }
    std::vector<std::string> row{std::to_string(cell.m),  format_full(cell.g),
                                 format_full(charge),     format_full(consistency),
                                 format_full(residual),   format_full(e_over_c),
                                 std::to_string(iterations), scrub(strategy)};
    for (const auto& s : provenance(cfg)) row.push_back(s);
    row.emplace_back();
    res.rows.push_back(join(row));
    char line[200];
    std::snprintf(line, sizeof line,
                  "  m=%lld g=%-5s charge=%.10g alpha_consistency=%.3e residual=%.3e (%s)", cell.m,
                  pretty(cell.g).c_str(), charge, consistency, residual, strategy.c_str());
    res.report_lines.emplace_back(line);
    return res;
}

std::string soliton_error_row(const StudyConfig& cfg, const Cell& cell, const std::string& msg) {
    std::vector<std::string> row{std::to_string(cell.m), format_full(cell.g), "", "", "", "", "", ""};
    for (const auto& s : provenance(cfg)) row.push_back(s);
    row.push_back(scrub(msg));
    return join(row);
}

// ---------------------------------------------------------------------------
// spectrum-scan: ground eigenvalue, projected eigenvalue and transversality of
// the linearized energy at each cell.

CellResult spectrum_cell(const StudyConfig& cfg, const Cell& cell) {
    CellResult res;
    const int m = static_cast<int>(cell.m);
    SolitonProfile p =
        solve_standing_wave(m, cell.g, cell.alpha, static_cast<int>(cfg.n), cfg.r_max);
    LinearizedSetup setup = build_setup(p);
    std::vector<std::string> row{std::to_string(cell.m),
                                 format_full(cell.g),
                                 format_full(cell.alpha),
                                 format_full(setup.lambda_min),
                                 format_full(setup.lambda_min_projected),
                                 format_full(setup.transversality),
                                 format_full(p.charge),
                                 format_full(p.residual)};
    for (const auto& s : provenance(cfg)) row.push_back(s);
    row.emplace_back();
    res.rows.push_back(join(row));
    char line[200];
    std::snprintf(line, sizeof line,
                  "  m=%lld g=%-5s alpha=%-4s lambda_min=%+.6f projected=%+.6f transversality=%.4f",
                  cell.m, pretty(cell.g).c_str(), pretty(cell.alpha).c_str(), setup.lambda_min,
                  setup.lambda_min_projected, setup.transversality);
    res.report_lines.emplace_back(line);
    return res;
}

std::string spectrum_error_row(const StudyConfig& cfg, const Cell& cell, const std::string& msg) {
    std::vector<std::string> row{std::to_string(cell.m), format_full(cell.g),
                                 format_full(cell.alpha), "", "", "", "", ""};
    for (const auto& s : provenance(cfg)) row.push_back(s);
    row.push_back(scrub(msg));
    return join(row);
}

// ---------------------------------------------------------------------------
// blowup-benchmark: evolve the exact concentrating state toward T = 1 and fit
// the scale per sample; the verdict asks the fitted scale to stay within 2% of
// T - t while the profile remains resolved (T - t >= 8 h sigma_q).

CellResult blowup_cell(const StudyConfig& cfg, const Cell& cell) {
    CellResult res;
    const int m = static_cast<int>(cell.m);
    const double T = 1.0;
    SolitonProfile p =
        solve_standing_wave(m, cell.g, cell.alpha, static_cast<int>(cfg.n), cfg.r_max);
    const RadialGrid& gr = p.grid;

    EvolutionConfig ec;
    ec.dt = cfg.dt;
    const double t_stop = std::min(cfg.t_end, 0.96 * T);
    const long long steps = std::max<long long>(1, static_cast<long long>(t_stop / cfg.dt + 1e-9));
    ec.t_end = static_cast<double>(steps) * cfg.dt;
    ec.sample_every = static_cast<int>(cfg.sample_every);

    RadialField f0 = pc_blowup_reference(p, T, 0.0);
    Trajectory tr = evolve(f0, ec);

    CubicSpline spq(p.q, gr.h);
    const double edge = 8.0 * gr.h * rms_radius(p.q, gr);
    double lam = T, gam = p.alpha / T;
    double max_dev = 0.0, eps_first = 0.0, eps_last = 0.0, eps_prev = 0.0;
    long long window = 0;
    bool monotone = true;
    std::string fit_note;
    for (size_t k = 0; k < tr.times.size(); ++k) {
        const double remaining = T - tr.times[k];
        try {
            std::tie(lam, gam) = fit_blowup_family(tr.states[k], p, lam, gam);
        } catch (const BasinEscape& ex) {
            fit_note = "; fit stopped at t=" + pretty(tr.times[k]);
            break;
        }
        double acc = 0.0;
        for (int i = 0; i < gr.n; ++i) {
            const std::complex<double> model =
                (spq(gr.r[i] / lam) / lam) *
                std::polar(1.0, gam - gr.r[i] * gr.r[i] / (4.0 * lam));
            acc += gr.w[i] * std::norm(tr.states[k][i] - model);
        }
        const double eps = std::sqrt(kTwoPi * acc);
        if (remaining >= edge) {
            max_dev = std::max(max_dev, std::abs(lam / remaining - 1.0));
            if (window == 0)
                eps_first = eps;
            else if (eps > 1.002 * eps_prev)
                monotone = false;
            eps_prev = eps;
            eps_last = eps;
            ++window;
        }
    }
    const bool pass = window >= 2 && max_dev <= 0.02;
    res.failed = !pass;
    std::vector<std::string> row{std::to_string(cell.m),
                                 format_full(cell.g),
                                 format_full(cell.alpha),
                                 format_full(T),
                                 format_full(edge),
                                 std::to_string(window),
                                 format_full(max_dev),
                                 format_full(eps_first),
                                 format_full(eps_last),
                                 monotone ? "1" : "0",
                                 pass ? "pass" : "fail",
                                 scrub(tr.stop_reason + fit_note)};
    for (const auto& s : provenance(cfg)) row.push_back(s);
    row.emplace_back();
    res.rows.push_back(join(row));
    char line[240];
    std::snprintf(line, sizeof line,
                  "  m=%lld g=%-5s alpha=%-4s window=(T-t)>=%.4f samples=%lld max_scale_dev=%.3e "
                  "eps %.2e -> %.2e %s: %s",
                  cell.m, pretty(cell.g).c_str(), pretty(cell.alpha).c_str(), edge, window, max_dev,
                  eps_first, eps_last, monotone ? "(shrinking)" : "(not monotone)",
                  pass ? "pass" : "FAIL");
    res.report_lines.emplace_back(line);
    return res;
}

std::string blowup_error_row(const StudyConfig& cfg, const Cell& cell, const std::string& msg) {
    std::vector<std::string> row{std::to_string(cell.m), format_full(cell.g),
                                 format_full(cell.alpha), "", "", "", "", "", "", "", "fail", ""};
    for (const auto& s : provenance(cfg)) row.push_back(s);
    row.push_back(scrub(msg));
    return join(row);
}

// ---------------------------------------------------------------------------

const std::set<std::string>& known_kinds() {
    static const std::set<std::string> kinds{"soliton-table", "spectrum-scan", "blowup-benchmark",
                                            "identity-suite"};
    return kinds;
}

std::string header_for(const std::string& kind) {
    const std::string prov = "n,r_max,dt,seed,code_version,error";
    if (kind == "identity-suite") return "m,check,measured,bound,pass," + prov;
    if (kind == "soliton-table")
        return "m,g,charge,alpha_consistency,residual,energy_over_charge,newton_iterations,"
               "strategy," + prov;
    if (kind == "spectrum-scan")
        return "m,g,alpha,lambda_min,lambda_min_projected,transversality,charge,residual," + prov;
    return "m,g,alpha,T,window_edge,window_samples,max_scale_dev,eps_first,eps_last,eps_monotone,"
           "verdict,stop_reason," + prov;
}

std::vector<Cell> enumerate_cells(const StudyConfig& cfg) {
    std::vector<Cell> cells;
    for (long long m : cfg.m_list) {
        if (cfg.kind == "identity-suite") {
            cells.push_back({m, 1.0, 0.0});
            continue;
        }
        for (double g : cfg.g_list) {
            if (cfg.kind == "soliton-table") {
                cells.push_back({m, g, 0.0});
            } else if (g == 1.0) {
                cells.push_back({m, g, 0.0});
            } else {
                for (double alpha : cfg.alpha_list) cells.push_back({m, g, alpha});
            }
        }
    }
    return cells;
}

CellResult run_cell(const StudyConfig& cfg, const Cell& cell) {
    try {
        if (cfg.kind == "identity-suite") return identity_cell(cfg, cell);
        if (cfg.kind == "soliton-table") return soliton_cell(cfg, cell);
        if (cfg.kind == "spectrum-scan") return spectrum_cell(cfg, cell);
        return blowup_cell(cfg, cell);
    } catch (const std::exception& ex) {
        CellResult res;
        res.failed = true;
        if (cfg.kind == "identity-suite")
            res.rows.push_back(identity_error_row(cfg, cell, ex.what()));
        else if (cfg.kind == "soliton-table")
            res.rows.push_back(soliton_error_row(cfg, cell, ex.what()));
        else if (cfg.kind == "spectrum-scan")
            res.rows.push_back(spectrum_error_row(cfg, cell, ex.what()));
        else
            res.rows.push_back(blowup_error_row(cfg, cell, ex.what()));
        res.report_lines.push_back("  " + cell_label(cfg.kind, cell) + ": FAILED: " + ex.what());
        return res;
    }
}

unsigned worker_count(size_t cells) {
    unsigned nt = std::thread::hardware_concurrency();
    if (nt == 0) nt = 1;
    if (const char* env = std::getenv("CSS_LAB_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1)
            throw BadConfig(std::string("CSS_LAB_THREADS must be a positive integer, got '") + env +
                            "'");
        nt = static_cast<unsigned>(v);
    }
    return static_cast<unsigned>(std::min<size_t>(nt, std::max<size_t>(cells, 1)));
}

std::string utc_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

template <class T>
std::string list_string(const std::vector<T>& xs) {
    std::string out;
    for (size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ',';
        if constexpr (std::is_floating_point_v<T>)
            out += format_full(xs[i]);
        else
            out += std::to_string(xs[i]);
    }
    return out;
}

void write_or_throw(const std::filesystem::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    out << body;
    if (!out.good()) throw BadConfig("cannot write '" + path.string() + "'");
}

void validate(const StudyConfig& cfg) {
    if (!known_kinds().count(cfg.kind))
        throw BadConfig("study kind must be one of soliton-table, spectrum-scan, "
                        "blowup-benchmark, identity-suite; got '" + cfg.kind + "'");
    if (cfg.out_dir.empty()) throw BadConfig("study config needs out_dir");
    if (cfg.m_list.empty() || cfg.g_list.empty() || cfg.alpha_list.empty())
        throw BadConfig("study lists must be nonempty");
    for (long long m : cfg.m_list)
        if (m < 0) throw BadConfig("equivariance index must be >= 0");
    for (double g : cfg.g_list)
        if (g < 1.0) throw BadConfig("coupling must be >= 1");
    for (double a : cfg.alpha_list)
        if (!(a > 0.0)) throw BadConfig("alpha_list entries must be positive");
    if (cfg.n < 8) throw BadConfig("study grid needs n >= 8");
    if (!(cfg.r_max > 0.0)) throw BadConfig("r_max must be positive");
    if (!(cfg.dt > 0.0)) throw BadConfig("dt must be positive");
    if (!(cfg.t_end > 0.0)) throw BadConfig("t_end must be positive");
    if (cfg.sample_every < 1) throw BadConfig("sample_every must be >= 1");
}

}  // namespace

StudyConfig parse_study_config(const std::string& path) {
    const auto kv = parse_kv_file(path);
    static const std::set<std::string> known_keys{"kind",  "m_list", "g_list",       "alpha_list",
                                                 "n",     "r_max",  "dt",           "t_end",
                                                 "out_dir", "seed", "sample_every"};
    for (const auto& [key, value] : kv)
        if (!known_keys.count(key))
            throw BadConfig(path + ": unknown study key '" + key + "'");
    StudyConfig cfg;
    cfg.kind = kv_string(kv, "kind");
    cfg.out_dir = kv_string(kv, "out_dir");
    if (kv.count("m_list")) cfg.m_list = kv_int_list(kv, "m_list");
    if (kv.count("g_list")) cfg.g_list = kv_double_list(kv, "g_list");
    if (kv.count("alpha_list")) cfg.alpha_list = kv_double_list(kv, "alpha_list");
    cfg.n = kv_int_or(kv, "n", cfg.n);
    cfg.r_max = kv_double_or(kv, "r_max", cfg.r_max);
    cfg.dt = kv_double_or(kv, "dt", cfg.dt);
    cfg.t_end = kv_double_or(kv, "t_end", cfg.t_end);
    cfg.sample_every = kv_int_or(kv, "sample_every", cfg.sample_every);
    cfg.seed = static_cast<std::uint64_t>(kv_int_or(kv, "seed", static_cast<long long>(cfg.seed)));
    validate(cfg);
    return cfg;
}

int run_study(const StudyConfig& cfg) {
    validate(cfg);
    const std::vector<Cell> cells = enumerate_cells(cfg);
    std::vector<CellResult> results(cells.size());

    const unsigned nt = worker_count(cells.size());
    if (nt <= 1) {
        for (size_t i = 0; i < cells.size(); ++i) results[i] = run_cell(cfg, cells[i]);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < nt; ++t)
            pool.emplace_back([&] {
                for (;;) {
                    const size_t i = next.fetch_add(1);
                    if (i >= cells.size()) return;
                    results[i] = run_cell(cfg, cells[i]);
                }
            });
        for (auto& th : pool) th.join();
    }

    int failed = 0;
    std::string csv = header_for(cfg.kind) + "\n";
    std::string report = "study " + cfg.kind + "\n";
    {
        char line[200];
        std::snprintf(line, sizeof line,
                      "grid: n=%lld r_max=%s dt=%s t_end=%s sample_every=%lld seed=%llu\n", cfg.n,
                      pretty(cfg.r_max).c_str(), pretty(cfg.dt).c_str(), pretty(cfg.t_end).c_str(),
                      cfg.sample_every, static_cast<unsigned long long>(cfg.seed));
        report += line;
    }
    for (size_t i = 0; i < cells.size(); ++i) {
        if (results[i].failed) ++failed;
        for (const auto& row : results[i].rows) csv += row + "\n";
        for (const auto& line : results[i].report_lines) report += line + "\n";
    }
    report += failed == 0 ? "verdict: all " + std::to_string(cells.size()) + " cells passed\n"
                          : "verdict: " + std::to_string(failed) + " of " +
                                std::to_string(cells.size()) + " cells failed\n";

    const std::filesystem::path dir(cfg.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw BadConfig("cannot create '" + cfg.out_dir + "': " + ec.message());
    write_or_throw(dir / "results.csv", csv);
    write_or_throw(dir / "report.txt", report);

    std::string meta;
    meta += "kind=" + cfg.kind + "\n";
    meta += "generated_at=" + utc_now() + "\n";
    meta += std::string("code_version=") + kCodeVersion + "\n";
    meta += "cells=" + std::to_string(cells.size()) + "\n";
    meta += "failed_cells=" + std::to_string(failed) + "\n";
    meta += "m_list=" + list_string(cfg.m_list) + "\n";
    meta += "g_list=" + list_string(cfg.g_list) + "\n";
    meta += "alpha_list=" + list_string(cfg.alpha_list) + "\n";
    meta += "n=" + std::to_string(cfg.n) + "\n";
    meta += "r_max=" + format_full(cfg.r_max) + "\n";
    meta += "dt=" + format_full(cfg.dt) + "\n";
    meta += "t_end=" + format_full(cfg.t_end) + "\n";
    meta += "sample_every=" + std::to_string(cfg.sample_every) + "\n";
    meta += "seed=" + std::to_string(cfg.seed) + "\n";
    meta += "threads=" + std::to_string(nt) + "\n";
    write_or_throw(dir / "meta", meta);
    return failed;
}

}  // namespace css
