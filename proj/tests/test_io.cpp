#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "css/functionals.hpp"
#include "css/grid.hpp"
#include "css/io.hpp"
#include "css/study.hpp"
#include "doctest.h"

namespace {

using namespace css;

namespace fs = std::filesystem;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("css_io_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RadialField sample_field() {
    RadialField f;
    f.m = 1;
    f.g = 1.5;
    f.grid = make_grid(64, 8.0);
    f.u.resize(64);
    for (int i = 0; i < 64; ++i)
        f.u[i] = std::complex<double>(std::sin(0.1 * i) / 3.0, std::cos(0.2 * i) / 7.0);
    return f;
}

TEST_CASE("io: field files round-trip bit for bit") {
    TempDir tmp;
    RadialField f = sample_field();
    const std::string p1 = tmp.file("a.csv"), p2 = tmp.file("b.csv");
    save_field(p1, f, {{"note", "unit"}});
    FieldFile ff = load_field(p1);
    CHECK(ff.field.m == f.m);
    CHECK(ff.field.g == f.g);
    CHECK(ff.field.grid.n == f.grid.n);
    CHECK(ff.field.grid.r_max == f.grid.r_max);
    CHECK(ff.meta.at("note") == "unit");
    for (int i = 0; i < f.grid.n; ++i) CHECK(ff.field.u[i] == f.u[i]);
    save_field(p2, ff.field, {{"note", "unit"}});
    CHECK(slurp(p1) == slurp(p2));
}

TEST_CASE("io: real profiles reuse the field layout") {
    TempDir tmp;
    RadialGrid g = make_grid(64, 8.0);
    std::vector<double> q(g.n);
    for (int i = 0; i < g.n; ++i) q[i] = std::exp(-g.r[i]);
    const std::string p = tmp.file("q.csv");
    save_profile(p, q, 2, 1.3, g, {{"alpha", "1"}});
    FieldFile ff = load_field(p);
    CHECK(ff.field.m == 2);
    for (int i = 0; i < g.n; ++i) {
        CHECK(ff.field.u[i].real() == q[i]);
        CHECK(ff.field.u[i].imag() == 0.0);
    }
}

TEST_CASE("io: loader diagnostics name the problem") {
    TempDir tmp;
    RadialField f = sample_field();
    const std::string good = tmp.file("good.csv");
    save_field(good, f);
    std::string body = slurp(good);

    // strip one required metadata line
    {
        std::string broken = body;
        const auto pos = broken.find("# m=");
        broken.erase(pos, broken.find('\n', pos) - pos + 1);
        const std::string p = tmp.file("no_m.csv");
        std::ofstream(p, std::ios::binary) << broken;
        try {
            load_field(p);
            FAIL("expected a missing-key failure");
        } catch (const BadFieldFile& e) {
            CHECK(std::string(e.what()).find("missing required metadata key 'm'") !=
                  std::string::npos);
        }
    }

    // bump the format version
    {
        std::string broken = body;
        const auto pos = broken.find("format_version=1");
        broken.replace(pos, 16, "format_version=2");
        const std::string p = tmp.file("v2.csv");
        std::ofstream(p, std::ios::binary) << broken;
        try {
            load_field(p);
            FAIL("expected a version failure");
        } catch (const BadFieldFile& e) {
            CHECK(std::string(e.what()).find("unsupported format_version 2") != std::string::npos);
        }
    }

    // drop the last data row
    {
        std::string broken = body;
        broken.erase(broken.rfind('\n', broken.size() - 2) + 1);
        const std::string p = tmp.file("short.csv");
        std::ofstream(p, std::ios::binary) << broken;
        CHECK_THROWS_AS(load_field(p), BadFieldFile);
    }

    CHECK_THROWS_AS(load_field(tmp.file("absent.csv")), BadFieldFile);
}

TEST_CASE("io: key=value parsing") {
    const std::string text =
        "# a comment\n"
        "\n"
        "kind = spectrum-scan\n"
        "m_list=0, 1,2\n"
        "g_list = 1.1,1.5\n"
        "note = x = y\n"
        "n = 512\n";
    auto kv = parse_kv_text(text, "inline");
    CHECK(kv_string(kv, "kind") == "spectrum-scan");
    CHECK(kv_string(kv, "note") == "x = y");
    CHECK(kv_int(kv, "n") == 512);
    CHECK(kv_int_or(kv, "missing", 7) == 7);
    CHECK(kv_double_or(kv, "missing", 0.5) == 0.5);
    auto ms = kv_int_list(kv, "m_list");
    REQUIRE(ms.size() == 3);
    CHECK(ms[0] == 0);
    CHECK(ms[2] == 2);
    auto gs = kv_double_list(kv, "g_list");
    REQUIRE(gs.size() == 2);
    CHECK(gs[1] == 1.5);

    try {
        kv_double(kv, "kind");
        FAIL("expected a parse failure");
    } catch (const BadConfig& e) {
        CHECK(std::string(e.what()).find("kind") != std::string::npos);
    }
    try {
        kv_string(kv, "absent");
        FAIL("expected a missing-key failure");
    } catch (const BadConfig& e) {
        CHECK(std::string(e.what()).find("absent") != std::string::npos);
    }
}

TEST_CASE("io: full-precision formatting round-trips doubles") {
    for (double x : {1.0 / 3.0, 1e-300, 3.141592653589793e10, -2.5e-7, 0.0, 16.0}) {
        const std::string s = format_full(x);
        CHECK(std::stod(s) == x);
    }
}

TEST_CASE("io: conserved report row matches its header") {
    ConservedReport rep;
    rep.t = 0.5;
    rep.mass = 1.0;
    const std::string header = conserved_csv_header();
    const std::string row = conserved_csv_row(rep);
    CHECK(std::count(header.begin(), header.end(), ',') ==
          std::count(row.begin(), row.end(), ','));
    CHECK(header.substr(0, 2) == "t,");
    CHECK(row.substr(0, 4) == "0.5,");
}

TEST_CASE("study: config parsing and validation") {
    TempDir tmp;
    const std::string cfg_path = tmp.file("study.cfg");
    std::ofstream(cfg_path) << "kind = identity-suite\n"
                               "m_list = 0,1\n"
                               "n = 256\n"
                               "r_max = 12\n"
                               "out_dir = " +
                                   tmp.file("out") + "\n";
    StudyConfig cfg = parse_study_config(cfg_path);
    CHECK(cfg.kind == "identity-suite");
    REQUIRE(cfg.m_list.size() == 2);
    CHECK(cfg.n == 256);
    CHECK(cfg.seed == 1);

    std::ofstream(cfg_path) << "kind = nonsense\nout_dir = x\n";
    CHECK_THROWS_AS(parse_study_config(cfg_path), BadConfig);
    std::ofstream(cfg_path) << "kind = identity-suite\nout_dir = x\ntypo_key = 1\n";
    CHECK_THROWS_AS(parse_study_config(cfg_path), BadConfig);
    std::ofstream(cfg_path) << "kind = identity-suite\n";
    CHECK_THROWS_AS(parse_study_config(cfg_path), BadConfig);
}

TEST_CASE("study: identical configurations give identical result bytes") {
    TempDir tmp;
    StudyConfig cfg;
    cfg.kind = "identity-suite";
    cfg.m_list = {0, 1};
    cfg.n = 512;
    cfg.r_max = 12.0;
    cfg.out_dir = tmp.file("run1");
    CHECK(run_study(cfg) == 0);
    cfg.out_dir = tmp.file("run2");
    CHECK(run_study(cfg) == 0);
    const std::string a = slurp(tmp.file("run1") + "/results.csv");
    const std::string b = slurp(tmp.file("run2") + "/results.csv");
    CHECK(!a.empty());
    CHECK(a == b);
    // 7 checks per index plus the header
    CHECK(std::count(a.begin(), a.end(), '\n') == 15);
    CHECK(slurp(tmp.file("run1") + "/report.txt") == slurp(tmp.file("run2") + "/report.txt"));
}

TEST_CASE("study: cell exceptions become error rows, not aborts") {
    TempDir tmp;
    StudyConfig cfg;
    cfg.kind = "soliton-table";
    cfg.m_list = {1};
    cfg.g_list = {1.5};
    cfg.alpha_list = {1.0};
    cfg.n = 8;  // far too coarse to hold the profile; the solve throws
    cfg.r_max = 40.0;
    cfg.out_dir = tmp.file("coarse");
    const int failed = run_study(cfg);
    CHECK(failed == 1);
    const std::string csv = slurp(tmp.file("coarse") + "/results.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
    const std::string row = csv.substr(csv.find('\n') + 1);
    CHECK(row.back() == '\n');
    CHECK(row[row.size() - 2] != ',');  // the error column is populated
    const std::string report = slurp(tmp.file("coarse") + "/report.txt");
    CHECK(report.find("FAILED") != std::string::npos);
}

TEST_CASE("study: failing checks mark the cell without stopping the run") {
    TempDir tmp;
    StudyConfig cfg;
    cfg.kind = "identity-suite";
    cfg.m_list = {1, 2};
    cfg.n = 8;  // closed form still evaluates, but the identities cannot hold
    cfg.r_max = 16.0;
    cfg.out_dir = tmp.file("id8");
    const int failed = run_study(cfg);
    CHECK(failed == 2);
    const std::string csv = slurp(tmp.file("id8") + "/results.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 15);  // both cells still report
    const std::string report = slurp(tmp.file("id8") + "/report.txt");
    CHECK(report.find("FAIL") != std::string::npos);
    CHECK(report.find("verdict: 2 of 2 cells failed") != std::string::npos);
}

TEST_CASE("study: invalid run configurations are rejected up front") {
    StudyConfig cfg;
    cfg.kind = "spectrum-scan";
    cfg.out_dir = "";
    CHECK_THROWS_AS(run_study(cfg), BadConfig);
    cfg.out_dir = "x";
    cfg.g_list = {0.5};
    CHECK_THROWS_AS(run_study(cfg), BadConfig);
    cfg.g_list = {1.5};
    cfg.alpha_list = {-1.0};
    CHECK_THROWS_AS(run_study(cfg), BadConfig);
}

}  // namespace
