#include "css/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "css/errors.hpp"

namespace css {

namespace {

std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

double parse_double(const std::string& raw, const std::string& where) {
    const std::string s = trim(raw);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw BadFieldFile(where + ": expected a number, got '" + s + "'");
    return v;
}

long long parse_int(const std::string& raw, const std::string& where) {
    const std::string s = trim(raw);
    char* end = nullptr;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0')
        throw BadFieldFile(where + ": expected an integer, got '" + s + "'");
    return v;
}

}  // namespace

std::string format_full(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void save_field(const std::string& path, const RadialField& f,
                const std::map<std::string, std::string>& extra_meta) {
    std::ofstream out(path);
    if (!out) throw BadFieldFile("cannot open '" + path + "' for writing");
    out << "# format_version=1\n";
    out << "# m=" << f.m << "\n";
    out << "# g=" << format_full(f.g) << "\n";
    out << "# n=" << f.grid.n << "\n";
    out << "# r_max=" << format_full(f.grid.r_max) << "\n";
    for (const auto& [k, v] : extra_meta) out << "# " << k << "=" << v << "\n";
    out << "r,re_u,im_u\n";
    for (int i = 0; i < f.grid.n; ++i)
        out << format_full(f.grid.r[i]) << ',' << format_full(f.u[i].real()) << ','
            << format_full(f.u[i].imag()) << "\n";
    if (!out) throw BadFieldFile("short write to '" + path + "'");
}

void save_profile(const std::string& path, const std::vector<double>& q, int m, double g,
                  const RadialGrid& grid, const std::map<std::string, std::string>& extra_meta) {
    RadialField f;
    f.m = m;
    f.g = g;
    f.grid = grid;
    f.u.assign(q.begin(), q.end());
    save_field(path, f, extra_meta);
}

FieldFile load_field(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw BadFieldFile("cannot open '" + path + "'");
    FieldFile ff;
    std::string line;
    int lineno = 0;
    bool header_seen = false;
    std::vector<double> rs, re, im;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = path + ":" + std::to_string(lineno);
        std::string s = trim(line);
        if (s.empty()) continue;
        if (s[0] == '#') {
            const std::string body = trim(s.substr(1));
            const size_t eq = body.find('=');
            if (eq != std::string::npos)
                ff.meta[trim(body.substr(0, eq))] = trim(body.substr(eq + 1));
            continue;
        }
        if (!header_seen) {
            if (s != "r,re_u,im_u")
                throw BadFieldFile(where + ": expected column header 'r,re_u,im_u', got '" + s +
                                   "'");
            header_seen = true;
            continue;
        }
        std::istringstream row(s);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(row, cell, ',')) cells.push_back(cell);
        if (cells.size() != 3)
            throw BadFieldFile(where + ": expected 3 comma-separated columns, got " +
                               std::to_string(cells.size()));
        rs.push_back(parse_double(cells[0], where + " column 1"));
        re.push_back(parse_double(cells[1], where + " column 2"));
        im.push_back(parse_double(cells[2], where + " column 3"));
    }
    for (const char* key : {"format_version", "m", "g", "n", "r_max"})
        if (!ff.meta.count(key))
            throw BadFieldFile(path + ": missing required metadata key '" + std::string(key) + "'");
    const long long ver = parse_int(ff.meta.at("format_version"), path + " format_version");
    if (ver != 1)
        throw BadFieldFile(path + ": unsupported format_version " + std::to_string(ver) +
                           " (this build reads version 1)");
    const long long n = parse_int(ff.meta.at("n"), path + " n");
    const double r_max = parse_double(ff.meta.at("r_max"), path + " r_max");
    if (static_cast<long long>(rs.size()) != n)
        throw BadFieldFile(path + ": metadata says n=" + std::to_string(n) + " but " +
                           std::to_string(rs.size()) + " rows were read");
    ff.field.m = static_cast<int>(parse_int(ff.meta.at("m"), path + " m"));
    ff.field.g = parse_double(ff.meta.at("g"), path + " g");
    ff.field.grid = make_grid(static_cast<int>(n), r_max);
    const double tol = 1e-9 * (1.0 + r_max);
    if (std::abs(rs.front() - 0.0) > tol || std::abs(rs.back() - r_max) > tol)
        throw BadFieldFile(path + ": radius column does not span [0, r_max]");
    ff.field.u.resize(n);
    for (long long i = 0; i < n; ++i) ff.field.u[i] = {re[i], im[i]};
    return ff;
}

std::map<std::string, std::string> parse_kv_text(const std::string& text,
                                                 const std::string& origin) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        const size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw BadConfig(origin + ":" + std::to_string(lineno) +
                            ": expected key=value, got '" + s + "'");
        kv[trim(s.substr(0, eq))] = trim(s.substr(eq + 1));
    }
    return kv;
}

std::map<std::string, std::string> parse_kv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw BadConfig("cannot open config '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_kv_text(buf.str(), path);
}

std::string kv_string(const std::map<std::string, std::string>& kv, const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw BadConfig("missing required key '" + key + "'");
    return it->second;
}

std::string kv_string_or(const std::map<std::string, std::string>& kv, const std::string& key,
                         const std::string& fallback) {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
}

double kv_double(const std::map<std::string, std::string>& kv, const std::string& key) {
    const std::string s = kv_string(kv, key);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw BadConfig("key '" + key + "': expected a number, got '" + s + "'");
    return v;
}

double kv_double_or(const std::map<std::string, std::string>& kv, const std::string& key,
                    double fallback) {
    return kv.count(key) ? kv_double(kv, key) : fallback;
}

long long kv_int(const std::map<std::string, std::string>& kv, const std::string& key) {
    const std::string s = kv_string(kv, key);
    char* end = nullptr;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0')
        throw BadConfig("key '" + key + "': expected an integer, got '" + s + "'");
    return v;
}

long long kv_int_or(const std::map<std::string, std::string>& kv, const std::string& key,
                    long long fallback) {
    return kv.count(key) ? kv_int(kv, key) : fallback;
}

namespace {
std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string cell;
    while (std::getline(in, cell, ',')) out.push_back(cell);
    return out;
}
}  // namespace

std::vector<double> kv_double_list(const std::map<std::string, std::string>& kv,
                                   const std::string& key) {
    std::vector<double> out;
    for (const std::string& cell : split_list(kv_string(kv, key))) {
        char* end = nullptr;
        const std::string t = trim(cell);
        const double v = std::strtod(t.c_str(), &end);
        if (end == t.c_str() || *end != '\0')
            throw BadConfig("key '" + key + "': expected a number list, got '" + t + "'");
        out.push_back(v);
    }
    if (out.empty()) throw BadConfig("key '" + key + "': empty list");
    return out;
}

std::vector<long long> kv_int_list(const std::map<std::string, std::string>& kv,
                                   const std::string& key) {
    std::vector<long long> out;
    for (const std::string& cell : split_list(kv_string(kv, key))) {
        char* end = nullptr;
        const std::string t = trim(cell);
        const long long v = std::strtoll(t.c_str(), &end, 10);
        if (end == t.c_str() || *end != '\0')
            throw BadConfig("key '" + key + "': expected an integer list, got '" + t + "'");
        out.push_back(v);
    }
    if (out.empty()) throw BadConfig("key '" + key + "': empty list");
    return out;
}

std::string conserved_csv_header() { return "t,mass,energy,energy_sd,l4,virial_v,virial_dv"; }

std::string conserved_csv_row(const ConservedReport& rep) {
    std::string row = format_full(rep.t);
    for (double v : {rep.mass, rep.energy, rep.energy_sd, rep.l4, rep.virial_v, rep.virial_dv})
        row += "," + format_full(v);
    return row;
}

}  // namespace css
