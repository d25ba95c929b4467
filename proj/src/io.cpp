#include "bergman/io.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace bergman {

namespace {

std::string at(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

[[noreturn]] void schema(const std::string& path, const std::string& msg) {
  throw ConfigError("config: " + path + ": " + msg);
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void emit(std::ostringstream& os, const json& j, int indent) {
  const std::string pad(2 * (indent + 1), ' ');
  const std::string close(2 * indent, ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << pad << json(it.key()).dump() << ": ";
        emit(os, it.value(), indent + 1);
      }
      os << "\n" << close << "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      bool flat = true;
      for (const auto& e : j) flat = flat && !e.is_structured();
      if (flat) {
        os << "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) os << ", ";
          emit(os, j[i], indent + 1);
        }
        os << "]";
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ",\n";
        os << pad;
        emit(os, j[i], indent + 1);
      }
      os << "\n" << close << "]";
      return;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      if (std::isfinite(v))
        os << fmt17(v);
      else
        os << number(v).dump();
      return;
    }
    default:
      os << j.dump();
  }
}

}  // namespace

const json& require(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) schema(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) schema(at(path, key), "missing");
  return *it;
}

double get_number(const json& j, const std::string& key, const std::string& path) {
  const json& v = require(j, key, path);
  if (!v.is_number()) schema(at(path, key), "expected a number");
  return v.get<double>();
}

double get_number(const json& j, const std::string& key, const std::string& path, double fallback) {
  if (!j.is_object()) schema(path, "expected an object");
  return j.contains(key) ? get_number(j, key, path) : fallback;
}

int get_int(const json& j, const std::string& key, const std::string& path, int fallback) {
  if (!j.is_object()) schema(path, "expected an object");
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer()) schema(at(path, key), "expected an integer");
  return v.get<int>();
}

std::uint64_t get_seed(const json& j, const std::string& path) {
  const json& v = require(j, "seed", path);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
    schema(at(path, "seed"), "expected a nonnegative integer");
  return v.get<std::uint64_t>();
}

RadialWeight parse_weight(const json& j, const std::string& path) {
  if (!j.is_object()) schema(path, "expected an object");
  const json& fam = require(j, "family", path);
  if (!fam.is_string()) schema(at(path, "family"), "expected a string");
  const int n = get_int(j, "n", path, 1);
  if (n < 1) schema(at(path, "n"), "must be >= 1");
  const std::string f = fam.get<std::string>();
  try {
    if (f == "power") {
      bool normalized = false;
      if (j.contains("normalized")) {
        if (!j.at("normalized").is_boolean()) schema(at(path, "normalized"), "expected a boolean");
        normalized = j.at("normalized").get<bool>();
      }
      return RadialWeight::power(get_number(j, "alpha", path, 0.0), normalized, n);
    }
    if (f == "logpower") return RadialWeight::logpower(get_number(j, "alpha", path, 0.0), n);
    if (f == "tabulated") {
      const json& nodes = require(j, "nodes", path);
      if (!nodes.is_array()) schema(at(path, "nodes"), "expected an array of [r, w] pairs");
      std::vector<std::pair<double, double>> v;
      for (const auto& e : nodes) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
          schema(at(path, "nodes"), "expected [r, w] pairs");
        v.emplace_back(e[0].get<double>(), e[1].get<double>());
      }
      return RadialWeight::tabulated(std::move(v), n);
    }
  } catch (const DomainError& e) {
    schema(path, e.what());
  }
  schema(at(path, "family"), "unknown family '" + f + "'");
}

json weight_json(const RadialWeight& w) {
  json j;
  j["n"] = w.n();
  switch (w.family()) {
    case WeightFamily::Power:
      j["family"] = "power";
      j["alpha"] = w.alpha();
      j["normalized"] = w.normalized();
      break;
    case WeightFamily::LogPower:
      j["family"] = "logpower";
      j["alpha"] = w.alpha();
      break;
    case WeightFamily::Tabulated: {
      j["family"] = "tabulated";
      json nodes = json::array();
      for (const auto& [r, v] : w.nodes()) nodes.push_back({r, v});
      j["nodes"] = nodes;
      break;
    }
  }
  return j;
}

cplx parse_complex(const json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  schema(path, "expected a number or [re, im]");
}

Point parse_point(const json& j, int n, const std::string& path) {
  if (!j.is_array()) schema(path, "expected an array of coordinates");
  if (static_cast<int>(j.size()) != n) schema(path, "expected " + std::to_string(n) + " coordinates");
  Point z;
  for (std::size_t i = 0; i < j.size(); ++i) z.push_back(parse_complex(j[i], path + "[" + std::to_string(i) + "]"));
  return z;
}

namespace {

MultiIndex parse_beta(const json& j, int n, const std::string& path) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) schema(path, "expected " + std::to_string(n) + " exponents");
  MultiIndex b;
  for (const auto& e : j) {
    if (!e.is_number_integer() || e.get<int>() < 0) schema(path, "exponents must be nonnegative integers");
    b.push_back(e.get<int>());
  }
  return b;
}

Point parse_ball_point(const json& j, int n, const std::string& path) {
  Point a = parse_point(j, n, path);
  if (norm(a) >= 1.0) schema(path, "must lie in the open unit ball");
  return a;
}

}  // namespace

HoloFun parse_function(const json& j, int n, const RadialWeight* w, const std::string& path) {
  if (!j.is_object()) schema(path, "expected an object");
  const json& kind = require(j, "kind", path);
  if (!kind.is_string()) schema(at(path, "kind"), "expected a string");
  const std::string k = kind.get<std::string>();
  const auto coef = [&](const json& o, const std::string& p) -> cplx {
    return o.contains("c") ? parse_complex(o.at("c"), at(p, "c")) : cplx(1.0);
  };
  try {
    if (k == "constant") return HoloFun::constant(n, coef(j, path));
    if (k == "monomial") return HoloFun::monomial(parse_beta(require(j, "beta", path), n, at(path, "beta")), coef(j, path));
    if (k == "poly") {
      const json& terms = require(j, "terms", path);
      if (!terms.is_array()) schema(at(path, "terms"), "expected an array");
      PolyMap m;
      for (std::size_t i = 0; i < terms.size(); ++i) {
        const std::string tp = at(path, "terms") + "[" + std::to_string(i) + "]";
        m[parse_beta(require(terms[i], "beta", tp), n, at(tp, "beta"))] += coef(terms[i], tp);
      }
      return HoloFun::poly(n, std::move(m));
    }
    if (k == "kernel_power" || k == "kernel_derivative") {
      const Point a = parse_ball_point(require(j, "a", path), n, at(path, "a"));
      const double s = get_number(j, "s", path);
      const double scale = get_number(j, "scale", path, 1.0);
      return k == "kernel_power" ? HoloFun::kernel_power(a, s, scale) : HoloFun::kernel_derivative(a, s, scale);
    }
    if (k == "test_function") {
      if (!w) schema(path, "test_function needs a weight");
      const Point a = parse_ball_point(require(j, "a", path), n, at(path, "a"));
      return test_function(a, get_number(j, "p", path), *w).f;
    }
    if (k == "dilate") {
      const double r = get_number(j, "r", path);
      if (!(r > 0.0 && r <= 1.0)) schema(at(path, "r"), "must lie in (0, 1]");
      return HoloFun::dilate(parse_function(require(j, "f", path), n, w, at(path, "f")), r);
    }
    if (k == "sum") {
      const json& parts = require(j, "parts", path);
      if (!parts.is_array() || parts.empty()) schema(at(path, "parts"), "expected a nonempty array");
      std::vector<HoloFun> v;
      for (std::size_t i = 0; i < parts.size(); ++i)
        v.push_back(parse_function(parts[i], n, w, at(path, "parts") + "[" + std::to_string(i) + "]"));
      return HoloFun::sum(v);
    }
  } catch (const DomainError& e) {
    schema(path, e.what());
  }
  schema(at(path, "kind"), "unknown function kind '" + k + "'");
}

Measure parse_measure(const json& j, const RadialWeight& w, const std::string& path) {
  if (!j.is_object()) schema(path, "expected an object");
  const json& kind = require(j, "kind", path);
  if (!kind.is_string()) schema(at(path, "kind"), "expected a string");
  const std::string k = kind.get<std::string>();
  const int n = w.n();
  const double scale = get_number(j, "scale", path, 1.0);
  if (!(scale > 0.0)) schema(at(path, "scale"), "must be positive");

  auto finish = [&](Measure m) { return scale == 1.0 ? m : m.scaled(scale); };
  try {
    if (k == "weighted") {
      const RadialWeight mw = j.contains("weight") ? parse_weight(j.at("weight"), at(path, "weight")) : w;
      if (mw.n() != n) schema(at(path, "weight"), "dimension differs from the experiment weight");
      const double s = get_number(j, "radial_power", path, 0.0);
      if (s < 0.0) schema(at(path, "radial_power"), "must be >= 0");
      Measure::RadialFactor h;
      std::string label = "omega";
      if (s != 0.0) {
        h = [s](double c) { return std::pow(c, s); };
        label = "(1-|z|)^" + fmt17(s) + " omega";
      }
      return finish(Measure::weighted(mw, h, {}, label));
    }
    if (k == "point_masses") {
      const json& atoms = require(j, "atoms", path);
      if (!atoms.is_array()) schema(at(path, "atoms"), "expected an array");
      std::vector<std::pair<Point, double>> v;
      for (std::size_t i = 0; i < atoms.size(); ++i) {
        const std::string ap = at(path, "atoms") + "[" + std::to_string(i) + "]";
        const double m = get_number(atoms[i], "mass", ap);
        if (!(m >= 0.0)) schema(at(ap, "mass"), "must be >= 0");
        v.emplace_back(parse_ball_point(require(atoms[i], "z", ap), n, at(ap, "z")), m);
      }
      return finish(Measure::point_masses(std::move(v)));
    }
    if (k == "density") {
      const HoloFun f = parse_function(require(j, "f", path), n, &w, at(path, "f"));
      const double t = get_number(j, "power", path, 2.0);
      if (!(t > 0.0)) schema(at(path, "power"), "must be positive");
      QuadratureSpec spec;
      spec.seed = get_seed(j, path);
      spec.region_samples = get_int(j, "region_samples", path, 20000);
      spec.sphere_samples = get_int(j, "sphere_samples", path, 4096);
      if (spec.region_samples < 1000 || spec.sphere_samples < 1000)
        schema(path, "Monte Carlo sample counts must be >= 1000");
      BallIntegrand rho = [f, t](const Point& z) { return std::pow(std::abs(f(z)), t); };
      return finish(Measure::density(n, rho, spec, "|f|^" + fmt17(t)));
    }
  } catch (const DomainError& e) {
    schema(path, e.what());
  }
  schema(at(path, "kind"), "unknown measure kind '" + k + "'");
}

json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

std::string dump_report(const json& j) {
  std::ostringstream os;
  emit(os, j, 0);
  os << "\n";
  return os.str();
}

std::string csv_table(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
  out += "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ",";
      out += std::isfinite(row[i]) ? fmt17(row[i]) : number(row[i]).get<std::string>();
    }
    out += "\n";
  }
  return out;
}

std::uint64_t config_hash(const json& config) { return fnv1a64(config.dump()); }

}  // namespace bergman
