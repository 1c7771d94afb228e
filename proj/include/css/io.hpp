#pragma once

#include <map>
#include <string>
#include <vector>

#include "css/functionals.hpp"
#include "css/grid.hpp"

namespace css {

// Field file layout (format_version 1):
//   # key=value          metadata block, one pair per line
//   r,re_u,im_u          column header
//   <n data rows>        full-precision decimal, '.' decimal point
// Required metadata: format_version, m, g, n, r_max. Extra pairs round-trip.
// Values are written with %.17g so that reread fields are bit-identical.
struct FieldFile {
    RadialField field;
    std::map<std::string, std::string> meta;
};

void save_field(const std::string& path, const RadialField& f,
                const std::map<std::string, std::string>& extra_meta = {});

FieldFile load_field(const std::string& path);

// Real profiles reuse the field layout with im_u = 0.
void save_profile(const std::string& path, const std::vector<double>& q, int m, double g,
                  const RadialGrid& grid, const std::map<std::string, std::string>& extra_meta = {});

// Flat key=value config text: '#' starts a comment, blank lines are skipped,
// the first '=' splits key from value, surrounding whitespace is trimmed.
std::map<std::string, std::string> parse_kv_file(const std::string& path);
std::map<std::string, std::string> parse_kv_text(const std::string& text, const std::string& origin);

// Typed lookups; the error message names the missing or malformed key.
std::string kv_string(const std::map<std::string, std::string>& kv, const std::string& key);
std::string kv_string_or(const std::map<std::string, std::string>& kv, const std::string& key,
                         const std::string& fallback);
double kv_double(const std::map<std::string, std::string>& kv, const std::string& key);
double kv_double_or(const std::map<std::string, std::string>& kv, const std::string& key,
                    double fallback);
long long kv_int(const std::map<std::string, std::string>& kv, const std::string& key);
long long kv_int_or(const std::map<std::string, std::string>& kv, const std::string& key,
                    long long fallback);
std::vector<double> kv_double_list(const std::map<std::string, std::string>& kv,
                                   const std::string& key);
std::vector<long long> kv_int_list(const std::map<std::string, std::string>& kv,
                                   const std::string& key);

// Deterministic numeric formatting for CSV bodies.
std::string format_full(double x);

std::string conserved_csv_header();
std::string conserved_csv_row(const ConservedReport& rep);

inline const char* kCodeVersion = "css-lab 1.0.0";

}  // namespace css
