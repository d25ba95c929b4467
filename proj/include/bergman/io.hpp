#pragma once

#include <string>
#include <vector>

#include "bergman/carleson.hpp"
#include "bergman/holo.hpp"
#include "bergman/weights.hpp"
#include "json.hpp"

namespace bergman {

using json = nlohmann::json;

// Schema helpers; every failure is a ConfigError naming the JSON path.
const json& require(const json& j, const std::string& key, const std::string& path);
double get_number(const json& j, const std::string& key, const std::string& path);
double get_number(const json& j, const std::string& key, const std::string& path, double fallback);
int get_int(const json& j, const std::string& key, const std::string& path, int fallback);
std::uint64_t get_seed(const json& j, const std::string& path);  // mandatory

// {"family": "power", "alpha": 0, "normalized": false, "n": 1}
// {"family": "logpower", "alpha": 2, "n": 2}
// {"family": "tabulated", "n": 1, "nodes": [[r, w], ...]}
RadialWeight parse_weight(const json& j, const std::string& path = "weight");
json weight_json(const RadialWeight& w);

// [x1, x2, ...] with real entries or [re, im] pairs
Point parse_point(const json& j, int n, const std::string& path);
cplx parse_complex(const json& j, const std::string& path);

// {"kind": "poly", "terms": [{"beta": [1, 0], "c": [re, im]}, ...]}
// {"kind": "monomial", "beta": [...], "c": ...}, {"kind": "constant", "c": ...}
// {"kind": "kernel_power", "a": [...], "s": 3, "scale": 1}
// {"kind": "kernel_derivative", "a": [...], "s": 3, "scale": 1}
// {"kind": "test_function", "a": [...], "p": 2} (needs the weight)
// {"kind": "dilate", "r": 0.9, "f": {...}}, {"kind": "sum", "parts": [...]}
HoloFun parse_function(const json& j, int n, const RadialWeight* w, const std::string& path);

// {"kind": "weighted", "weight": {...} (defaults to the experiment weight),
//  "radial_power": s}                     -> (1-|z|)^s omega dV
// {"kind": "point_masses", "atoms": [{"z": [...], "mass": m}, ...]}
// {"kind": "density", "f": {...}, "power": t, "region_samples": N, "seed": S}  -> |f|^t dV
// any kind may carry "scale": c
Measure parse_measure(const json& j, const RadialWeight& w, const std::string& path = "measure");

// JSON text with every number printed as %.17g (C locale), keys sorted,
// two-space indentation; non-finite numbers become the strings "inf",
// "-inf", "nan"
std::string dump_report(const json& j);

// CSV with a header row; numbers as %.17g, '.' decimal
std::string csv_table(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows);

json number(double v);  // non-finite values as strings
std::uint64_t config_hash(const json& config);

}  // namespace bergman
