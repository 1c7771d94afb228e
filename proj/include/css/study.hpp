#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace css {

// Batch driver. A study is a cross product of (m, g, alpha) cells run through
// one of four pipelines; per-cell failures land in the results table as rows
// with a nonempty error column and never abort the sweep.
struct StudyConfig {
    std::string kind;                 // soliton-table | spectrum-scan | blowup-benchmark | identity-suite
    std::vector<long long> m_list{1};
    std::vector<double> g_list{1.5};
    std::vector<double> alpha_list{1.0};
    long long n = 1024;
    double r_max = 16.0;
    double dt = 1e-4;
    double t_end = 1.0;
    long long sample_every = 100;
    std::string out_dir;
    std::uint64_t seed = 1;
};

StudyConfig parse_study_config(const std::string& path);

// Runs all cells, possibly in parallel (CSS_LAB_THREADS caps the worker
// count), and writes results.csv plus meta in out_dir. Row order and body
// bytes depend only on the config, never on scheduling; timestamps go to the
// meta file only.
int run_study(const StudyConfig& cfg);

}  // namespace css
