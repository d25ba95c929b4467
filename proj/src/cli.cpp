#include "bergman/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "bergman/carleson.hpp"
#include "bergman/geometry.hpp"
#include "bergman/norms.hpp"
#include "bergman/volterra.hpp"

namespace bergman {

namespace {

using Task = std::function<void(Outputs&)>;

[[noreturn]] void schema(const std::string& path, const std::string& msg) {
  throw ConfigError("config: " + path + ": " + msg);
}

void allow_keys(const json& cfg, const std::set<std::string>& keys) {
  for (auto it = cfg.begin(); it != cfg.end(); ++it)
    if (!keys.count(it.key())) schema(it.key(), "unknown key");
}

double positive(const json& cfg, const std::string& key, const std::string& path, double fallback) {
  const double v = get_number(cfg, key, path, fallback);
  if (!(v > 0.0) || !std::isfinite(v)) schema(path.empty() ? key : path + "." + key, "must be positive and finite");
  return v;
}

long samples_at_least(const json& j, const std::string& key, const std::string& path, long fallback, long floor) {
  const long v = get_int(j, key, path, static_cast<int>(fallback));
  if (v < floor) schema(path + "." + key, "must be >= " + std::to_string(floor));
  return v;
}

json point_json(const Point& z) {
  json a = json::array();
  for (const cplx& c : z) a.push_back({number(c.real()), number(c.imag())});
  return a;
}

json pairs_json(const std::vector<std::pair<double, double>>& v) {
  json a = json::array();
  for (const auto& [x, y] : v) a.push_back({number(x), number(y)});
  return a;
}

RadialWeight weight_of(const json& cfg) { return parse_weight(require(cfg, "weight", ""), "weight"); }

// ---- weight-info ----------------------------------------------------------

Task plan_weight_info(const json& cfg) {
  allow_keys(cfg, {"command", "weight", "output"});
  const RadialWeight w = weight_of(cfg);
  return [w](Outputs& out) {
    const WeightClassReport c = classify(w);
    json& r = out.report;
    r["weight"] = weight_json(w);
    r["description"] = w.describe();
    r["doubling_constant_estimate"] = number(c.doubling_constant_estimate);
    r["regularity_min"] = number(c.regularity_min);
    r["regularity_max"] = number(c.regularity_max);
    r["regularity_at_09"] = number(c.regularity_at_09);
    r["doubling_exponent_beta"] = number(c.doubling_exponent_beta);
    r["doubling_tail_slope"] = number(c.doubling_tail_slope);
    r["in_Dhat"] = c.in_Dhat;
    r["in_R"] = c.in_R;
    r["in_I"] = c.in_I;
    r["ball_mass"] = number(w.ball_mass());
    std::vector<std::vector<double>> rows;
    json table = json::array();
    for (std::size_t i = 0; i < c.grid.size(); ++i) {
      rows.push_back({c.grid[i], c.doubling_ratios[i], c.regularity_ratios[i]});
      table.push_back({number(c.grid[i]), number(c.doubling_ratios[i]), number(c.regularity_ratios[i])});
    }
    r["table_columns"] = {"r", "doubling_ratio", "regularity_ratio"};
    r["table"] = table;
    out.tables[""] = csv_table({"r", "doubling_ratio", "regularity_ratio"}, rows);
  };
}

// ---- norm -----------------------------------------------------------------

NormSpec norm_spec(const json& cfg, std::uint64_t seed) {
  NormSpec s;
  s.quad.seed = seed;
  if (!cfg.contains("spec")) return s;
  const json& j = cfg.at("spec");
  if (!j.is_object()) schema("spec", "expected an object");
  allow_keys(j, {"sphere_samples", "outer_samples", "inner_samples", "candidates", "region_samples"});
  s.quad.sphere_samples = samples_at_least(j, "sphere_samples", "spec", s.quad.sphere_samples, 1000);
  s.quad.region_samples = samples_at_least(j, "region_samples", "spec", s.quad.region_samples, 1000);
  s.outer_samples = samples_at_least(j, "outer_samples", "spec", s.outer_samples, 1000);
  s.inner_samples = samples_at_least(j, "inner_samples", "spec", s.inner_samples, 1);
  s.candidates = static_cast<int>(samples_at_least(j, "candidates", "spec", s.candidates, 1));
  return s;
}

json norm_json(const NormReport& r) {
  return {{"value", number(r.value)},
          {"error", number(r.error)},
          {"formula", formula_id(r.formula)},
          {"method", r.method},
          {"inputs_hash", hex64(r.inputs_hash)}};
}

Task plan_norm(const json& cfg) {
  allow_keys(cfg, {"command", "weight", "function", "p", "formula", "r", "aperture", "spec", "seed", "sweep", "output"});
  const RadialWeight w = weight_of(cfg);
  const double p = positive(cfg, "p", "", 2.0);
  const std::uint64_t seed = get_seed(cfg, "");
  const NormSpec spec = norm_spec(cfg, seed);

  if (cfg.contains("sweep")) {
    // ||F_{a,p}||^p / omega(S_a) along a = (1 - 2^-k) xi
    if (cfg.contains("function") || cfg.contains("formula")) schema("sweep", "excludes 'function' and 'formula'");
    const json& sw = cfg.at("sweep");
    allow_keys(sw, {"kind", "k_max", "direction"});
    if (require(sw, "kind", "sweep") != "test_function") schema("sweep.kind", "only 'test_function' is supported");
    const int kmax = get_int(sw, "k_max", "sweep", 14);
    if (kmax < 1 || kmax > 40) schema("sweep.k_max", "must lie in [1, 40]");
    Point xi = sw.contains("direction") ? parse_point(sw.at("direction"), w.n(), "sweep.direction") : unit_vector(w.n(), 0);
    if (std::abs(norm(xi) - 1.0) > 1e-12) schema("sweep.direction", "must be a unit vector");
    return [w, p, spec, kmax, xi](Outputs& out) {
      json& r = out.report;
      r["weight"] = weight_json(w);
      r["p"] = number(p);
      r["gamma"] = number(test_function_gamma(w));
      r["rows"] = json::array();
      std::vector<double> radii, ratios;
      std::vector<std::vector<double>> rows;
      for (int k = 1; k <= kmax; ++k) {
        const double rad = 1.0 - std::ldexp(1.0, -k);
        const Point a = scaled(xi, rad);
        const NormReport nr = bergman_norm_p(test_function(a, p, w).f, w, p, spec);
        const double om = omega_block_mass(w, a);
        const double ratio = nr.value / om;
        radii.push_back(rad);
        ratios.push_back(ratio);
        rows.push_back({rad, nr.value, ratio, nr.error});
        r["rows"].push_back({{"r", number(rad)},
                             {"value", number(nr.value)},
                             {"ratio", number(ratio)},
                             {"stderr", number(nr.error)},
                             {"method", nr.method}});
      }
      const BracketCheck b = bracket_check(radii, ratios, 100.0, 0.1);
      // trend over the tail k >= k_max / 2, where the comparison is asymptotic
      const std::size_t k0 = static_cast<std::size_t>(kmax / 2) - (kmax > 1 ? 1 : 0);
      std::vector<double> lx, ly;
      for (std::size_t i = k0; i < radii.size(); ++i) {
        lx.push_back(-std::log1p(-radii[i]));
        ly.push_back(std::log(ratios[i]));
      }
      const double tail = lx.size() >= 2 ? ls_slope(lx, ly) : 0.0;
      r["bracket"] = {{"min", number(b.min)},   {"max", number(b.max)},         {"spread", number(b.spread)},
                      {"slope", number(b.slope)}, {"tail_slope", number(tail)},
                      {"ok", b.spread <= 100.0 && std::abs(tail) <= 0.1}};
      out.tables[""] = csv_table({"r", "value", "ratio", "stderr"}, rows);
    };
  }

  const HoloFun f = parse_function(require(cfg, "function", ""), w.n(), &w, "function");
  std::string formula = "bergman";
  if (cfg.contains("formula")) {
    if (!cfg.at("formula").is_string()) schema("formula", "expected a string");
    formula = cfg.at("formula").get<std::string>();
  }
  static const std::set<std::string> formulas{"bergman", "hardy",  "lp_identity", "lp_equiv_star",
                                              "lp_equiv_hat", "area", "maxfun"};
  if (!formulas.count(formula)) schema("formula", "unknown formula '" + formula + "'");
  const bool needs_p2 = formula == "lp_identity" || formula == "lp_equiv_star" || formula == "lp_equiv_hat";
  if (needs_p2 && p < 2.0) schema("p", "this formula needs p >= 2");
  double radius = 0.0;
  if (formula == "hardy") {
    radius = get_number(cfg, "r", "");
    if (!(radius >= 0.0 && radius < 1.0)) schema("r", "must lie in [0, 1)");
  } else if (cfg.contains("r")) {
    schema("r", "only used by the 'hardy' formula");
  }
  const double aperture = get_number(cfg, "aperture", "", 4.0);
  if ((formula == "area" || formula == "maxfun") && !(aperture > 2.0)) schema("aperture", "must exceed 2");

  return [w, p, spec, f, formula, radius, aperture](Outputs& out) {
    json& r = out.report;
    r["weight"] = weight_json(w);
    r["function"] = f.describe();
    r["p"] = number(p);
    if (formula == "hardy") r["r"] = number(radius);
    if (formula == "area" || formula == "maxfun") r["aperture"] = number(aperture);
    NormReport nr;
    if (formula == "bergman") nr = bergman_norm_p(f, w, p, spec);
    else if (formula == "hardy") nr = hardy_means(f, p, radius, spec);
    else if (formula == "lp_identity") nr = lp_identity_rhs(f, w, p, spec);
    else if (formula == "lp_equiv_star") nr = lp_equiv(f, w, p, LpVariant::Star, spec);
    else if (formula == "lp_equiv_hat") nr = lp_equiv(f, w, p, LpVariant::Hat, spec);
    else if (formula == "area") nr = area_norm(f, w, p, aperture, spec);
    else nr = maxfun_norm(f, w, p, aperture, spec);
    r["norm"] = norm_json(nr);
  };
}

// ---- equivalence-report ---------------------------------------------------

std::vector<HoloFun> random_polys(int n, int count, int degree, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0x5017e));
  std::vector<HoloFun> out;
  while (static_cast<int>(out.size()) < count) {
    PolyMap m;
    const int terms = 1 + static_cast<int>(rng.uniform() * 4);
    for (int t = 0; t < terms; ++t) {
      MultiIndex b(n, 0);
      const int d = 1 + static_cast<int>(rng.uniform() * degree);
      for (int i = 0; i < d; ++i) ++b[static_cast<int>(rng.uniform() * n)];
      m[b] += cplx(rng.normal(), rng.normal());
    }
    if (rng.uniform() < 0.5) m[MultiIndex(n, 0)] += cplx(rng.normal(), rng.normal());
    HoloFun f = HoloFun::poly(n, m);
    if (!is_identically_zero(subtract_value_at_zero(f))) out.push_back(f);
  }
  return out;
}

Task plan_equivalence(const json& cfg) {
  allow_keys(cfg, {"command", "weight", "functions", "suite", "p", "spec", "seed", "output"});
  const RadialWeight w = weight_of(cfg);
  const double p = positive(cfg, "p", "", 2.0);
  if (p < 2.0) schema("p", "the identity needs p >= 2");
  const std::uint64_t seed = get_seed(cfg, "");
  const NormSpec spec = norm_spec(cfg, seed);
  std::vector<HoloFun> fs;
  if (cfg.contains("functions")) {
    const json& a = cfg.at("functions");
    if (!a.is_array() || a.empty()) schema("functions", "expected a nonempty array");
    for (std::size_t i = 0; i < a.size(); ++i)
      fs.push_back(parse_function(a[i], w.n(), &w, "functions[" + std::to_string(i) + "]"));
  }
  if (cfg.contains("suite")) {
    const json& s = cfg.at("suite");
    allow_keys(s, {"count", "degree"});
    const int count = get_int(s, "count", "suite", 20);
    const int degree = get_int(s, "degree", "suite", 6);
    if (count < 1 || count > 1000) schema("suite.count", "must lie in [1, 1000]");
    if (degree < 1 || degree > 20) schema("suite.degree", "must lie in [1, 20]");
    for (const HoloFun& f : random_polys(w.n(), count, degree, seed)) fs.push_back(f);
  }
  if (fs.empty()) schema("functions", "give 'functions' or 'suite'");

  return [w, p, spec, fs](Outputs& out) {
    json& r = out.report;
    r["weight"] = weight_json(w);
    r["p"] = number(p);
    r["rows"] = json::array();
    std::vector<std::vector<double>> rows;
    double worst = 0.0;
    for (std::size_t i = 0; i < fs.size(); ++i) {
      const NormReport lhs = bergman_norm_p(subtract_value_at_zero(fs[i]), w, p, spec);
      const NormReport rhs = lp_identity_rhs(fs[i], w, p, spec);
      const NormReport star = lp_equiv(fs[i], w, p, LpVariant::Star, spec);
      const NormReport hat = lp_equiv(fs[i], w, p, LpVariant::Hat, spec);
      const double ratio = rhs.value / lhs.value;
      const double err = std::hypot(lhs.error, rhs.error);
      worst = std::max(worst, std::abs(rhs.value - lhs.value) / lhs.value);
      rows.push_back({static_cast<double>(i), lhs.value, rhs.value, ratio, err, star.value / lhs.value,
                      hat.value / lhs.value});
      r["rows"].push_back({{"function", fs[i].describe()},
                           {"lhs", number(lhs.value)},
                           {"rhs", number(rhs.value)},
                           {"ratio", number(ratio)},
                           {"stderr", number(err)},
                           {"ratio_star", number(star.value / lhs.value)},
                           {"ratio_hat", number(hat.value / lhs.value)},
                           {"method", lhs.method + "/" + rhs.method}});
    }
    r["max_relative_gap"] = number(worst);
    out.tables[""] = csv_table({"function", "lhs", "rhs", "ratio", "stderr", "ratio_star", "ratio_hat"}, rows);
  };
}

// ---- carleson -------------------------------------------------------------

CarlesonLattice lattice_of(const json& cfg, std::uint64_t seed, CarlesonLattice lat) {
  lat.seed = seed;
  if (!cfg.contains("lattice")) return lat;
  const json& j = cfg.at("lattice");
  allow_keys(j, {"K", "directions"});
  lat.K = get_int(j, "K", "lattice", lat.K);
  lat.directions = get_int(j, "directions", "lattice", lat.directions);
  if (lat.K < 1 || lat.K > 40) schema("lattice.K", "must lie in [1, 40]");
  if (lat.directions < 0) schema("lattice.directions", "must be >= 0");
  return lat;
}

Task plan_carleson(const json& cfg) {
  allow_keys(cfg, {"command", "weight", "measure", "p", "q", "lattice", "seed", "embedding", "output"});
  const RadialWeight w = weight_of(cfg);
  const double p = positive(cfg, "p", "", 2.0);
  const double q = positive(cfg, "q", "", p);
  if (q < p) schema("q", "the embedding needs q >= p");
  const std::uint64_t seed = get_seed(cfg, "");
  const CarlesonLattice lat = lattice_of(cfg, seed, {});
  const Measure mu = parse_measure(require(cfg, "measure", ""), w);
  bool embedding = false;
  if (cfg.contains("embedding")) {
    if (!cfg.at("embedding").is_boolean()) schema("embedding", "expected a boolean");
    embedding = cfg.at("embedding").get<bool>();
  }
  return [w, p, q, lat, mu, embedding](Outputs& out) {
    json& r = out.report;
    r["weight"] = weight_json(w);
    r["measure"] = {{"label", mu.label()}, {"total", number(mu.total())}};
    r["p"] = number(p);
    r["q"] = number(q);
    r["lattice"] = {{"K", lat.K}, {"directions", lat.directions}, {"seed", lat.seed}};
    const CarlesonReport c = carleson_quotient(mu, w, p, q, lat);
    r["sup_estimate"] = number(c.sup_estimate);
    r["radial_profile"] = pairs_json(c.radial_profile);
    r["profile_slope"] = number(c.profile_slope);
    r["degenerate_count"] = c.degenerate_count;
    r["lattice_points"] = static_cast<long>(c.samples.size());
    r["inputs_hash"] = hex64(c.inputs_hash);
    std::vector<std::vector<double>> rows;
    for (const auto& [rad, v] : c.radial_profile) rows.push_back({rad, v});
    out.tables[""] = csv_table({"r", "value"}, rows);
    if (embedding) r["embedding_lower"] = number(embedding_lower_bound(mu, w, p, q, lat));
  };
}

// ---- volterra-verdict -----------------------------------------------------

Task plan_volterra(const json& cfg) {
  allow_keys(cfg, {"command", "weight", "symbol", "p", "q", "lattice", "spec", "seed", "output"});
  const RadialWeight w = weight_of(cfg);
  const double p = positive(cfg, "p", "", 2.0);
  const double q = positive(cfg, "q", "", p);
  if (q < p) schema("q", "only 0 < p <= q is supported");
  const std::uint64_t seed = get_seed(cfg, "");
  const HoloFun g = parse_function(require(cfg, "symbol", ""), w.n(), &w, "symbol");
  VolterraSpec spec;
  spec.lattice = lattice_of(cfg, seed, CarlesonLattice{10, 0, seed});
  if (cfg.contains("spec")) {
    const json& j = cfg.at("spec");
    allow_keys(j, {"cap_samples", "region_samples", "directions", "ascent_steps", "trend_tol", "operator_K",
                   "operator_samples", "space_seminorms", "bmoa_K", "bmoa_directions", "bmoa_samples"});
    spec.cap_samples = samples_at_least(j, "cap_samples", "spec", spec.cap_samples, 1000);
    spec.region_samples = samples_at_least(j, "region_samples", "spec", spec.region_samples, 1000);
    spec.operator_samples = samples_at_least(j, "operator_samples", "spec", spec.operator_samples, 1000);
    spec.bmoa_samples = samples_at_least(j, "bmoa_samples", "spec", spec.bmoa_samples, 1000);
    spec.directions = static_cast<int>(samples_at_least(j, "directions", "spec", spec.directions, 1));
    spec.ascent_steps = static_cast<int>(samples_at_least(j, "ascent_steps", "spec", spec.ascent_steps, 0));
    spec.operator_K = static_cast<int>(samples_at_least(j, "operator_K", "spec", spec.operator_K, 3));
    spec.bmoa_K = static_cast<int>(samples_at_least(j, "bmoa_K", "spec", spec.bmoa_K, 1));
    spec.bmoa_directions = static_cast<int>(samples_at_least(j, "bmoa_directions", "spec", spec.bmoa_directions, 1));
    spec.trend_tol = positive(j, "trend_tol", "spec", spec.trend_tol);
    if (j.contains("space_seminorms")) {
      if (!j.at("space_seminorms").is_boolean()) schema("spec.space_seminorms", "expected a boolean");
      spec.space_seminorms = j.at("space_seminorms").get<bool>();
    }
  }
  return [w, p, q, g, spec](Outputs& out) {
    json& r = out.report;
    r["weight"] = weight_json(w);
    r["symbol"] = g.describe();
    r["p"] = number(p);
    r["q"] = number(q);
    const SymbolReport s = tg_verdict(g, w, p, q, spec);
    r["regime"] = regime_id(s.regime);
    r["kappa"] = number(s.kappa);
    r["bounded"] = s.bounded;
    r["margin"] = number(s.margin);
    r["basis"] = s.basis;
    if (s.regime == Regime::Carleson) {
      r["c_kappa_seminorm"] = number(s.c_kappa_seminorm);
      r["c1_profile"] = pairs_json(s.c1.profile);
      r["c1_profile_slope"] = number(s.c1.profile_slope);
      r["c1_method"] = s.c1.method;
    }
    const auto profile = [](const std::vector<ProfileRow>& rows, std::vector<std::vector<double>>& csv) {
      json a = json::array();
      for (const ProfileRow& x : rows) {
        a.push_back({number(x.r), number(x.quantity), number(x.bound), number(x.ratio)});
        csv.push_back({x.r, x.quantity, x.bound, x.ratio});
      }
      return a;
    };
    std::vector<std::vector<double>> m_rows, op_rows;
    r["profile_columns"] = {"r", "quantity", "bound", "ratio"};
    r["m_infty_profile"] = profile(s.m_infty_profile, m_rows);
    r["m_infty_slope"] = number(s.m_infty_slope);
    r["operator_profile"] = profile(s.operator_profile, op_rows);
    r["operator_slope"] = number(s.operator_slope);
    r["operator_consistent"] = s.operator_consistent;
    if (spec.space_seminorms) {
      r["bloch_seminorm"] = number(s.bloch_seminorm);
      r["bmoa_seminorm"] = number(s.bmoa_seminorm);
    }
    r["tail_slope"] = number(s.tail_slope);
    r["tail_monotone"] = s.tail_monotone;
    r["inputs_hash"] = hex64(s.inputs_hash);
    const std::vector<std::string> cols{"r", "quantity", "bound", "ratio"};
    out.tables["_operator"] = csv_table(cols, op_rows);
    if (!m_rows.empty()) out.tables["_m_infty"] = csv_table(cols, m_rows);
  };
}

// ---- geometry-check -------------------------------------------------------

json predicate_json(const PredicateCheck& c) {
  json ex = json::array();
  for (const Counterexample& e : c.examples)
    ex.push_back({{"center", point_json(e.center)}, {"radius", number(e.radius)}, {"z", point_json(e.z)}});
  return {{"name", c.name}, {"samples", c.samples}, {"counterexamples", c.counterexamples}, {"examples", ex}};
}

Task plan_geometry(const json& cfg) {
  allow_keys(cfg, {"command", "n", "samples", "seed", "aperture", "output"});
  const int n = get_int(cfg, "n", "", 1);
  if (n < 1 || n > 16) schema("n", "must lie in [1, 16]");
  const long samples = samples_at_least(cfg, "samples", "", 100000, 1000);
  const std::uint64_t seed = get_seed(cfg, "");
  const double aperture = get_number(cfg, "aperture", "", 4.0);
  if (!(aperture > 2.0)) schema("aperture", "must exceed 2");
  return [n, samples, seed, aperture](Outputs& out) {
    json& r = out.report;
    r["n"] = n;
    r["samples"] = samples;
    r["aperture"] = number(aperture);
    const ComparisonReport tb = tube_block_comparison_check(samples, derive_seed(seed, 1), n);
    const PredicateCheck ad = admissible_dilation_check(samples, derive_seed(seed, 2), n, aperture);
    const PredicateCheck tn = tent_in_block_check(samples, derive_seed(seed, 3), n, aperture);
    r["checks"] = json::array({predicate_json(tb.tube_in_block), predicate_json(tb.block_in_tube),
                               predicate_json(ad), predicate_json(tn)});
    r["ok"] = tb.ok() && ad.counterexamples == 0 && tn.counterexamples == 0;
    // cap law sigma(Q(xi, r)) / r^{2n} on r = 2^{-j/4}
    std::vector<std::vector<double>> rows;
    json law = json::array();
    for (int j = 0; j <= 40; ++j) {
      const double rad = std::exp2(-j / 4.0);
      const double v = cap_measure(rad, n) / std::pow(rad, 2 * n);
      rows.push_back({rad, v});
      law.push_back({number(rad), number(v)});
    }
    r["cap_law"] = law;
    out.tables[""] = csv_table({"r", "value"}, rows);
  };
}

Task plan(const std::string& command, const json& cfg) {
  if (!cfg.is_object()) schema("(root)", "expected an object");
  if (cfg.contains("command") && cfg.at("command") != command)
    schema("command", "config is for '" + cfg.at("command").dump() + "', not '" + command + "'");
  if (command == "weight-info") return plan_weight_info(cfg);
  if (command == "norm") return plan_norm(cfg);
  if (command == "equivalence-report") return plan_equivalence(cfg);
  if (command == "carleson") return plan_carleson(cfg);
  if (command == "volterra-verdict") return plan_volterra(cfg);
  if (command == "geometry-check") return plan_geometry(cfg);
  schema("command", "unknown command '" + command + "'");
}

struct OutputSpec {
  std::string stem;
  bool csv = false;
};

OutputSpec output_of(const std::string& command, const json& cfg) {
  OutputSpec o{command, false};
  if (!cfg.contains("output")) return o;
  const json& j = cfg.at("output");
  allow_keys(j, {"path", "format"});
  if (j.contains("path")) {
    if (!j.at("path").is_string() || j.at("path").get<std::string>().empty()) schema("output.path", "expected a name");
    o.stem = j.at("path").get<std::string>();
  }
  if (j.contains("format")) {
    const json& f = j.at("format");
    if (f == "csv") o.csv = true;
    else if (f != "json") schema("output.format", "expected 'json' or 'csv'");
  }
  return o;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  os << text;
  if (!os) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace

void run_experiment(const std::string& command, const json& config, Outputs& out) {
  const Task task = plan(command, config);
  out.report = json::object();
  out.report["command"] = command;
  out.report["version"] = kVersion;
  out.report["config_hash"] = hex64(config_hash(config));
  if (config.contains("seed")) out.report["seed"] = config.at("seed");
  out.report["status"] = "ok";
  task(out);
}

int run(const std::string& command, const json& config, const std::string& out_dir, std::ostream& log) {
  Outputs out;
  OutputSpec os;
  int status = kExitOk;
  try {
    os = output_of(command, config);
    run_experiment(command, config, out);
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const DomainError& e) {
    log << "error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const UnsupportedRegime& e) {
    log << "error: unsupported: " << e.what() << "\n";
    return kExitSchema;
  } catch (const AccuracyError& e) {
    log << "error: accuracy: " << e.what() << "\n";
    out.report["status"] = "accuracy_error";
    out.report["error"] = {{"message", e.what()}, {"estimate", number(e.estimate)}, {"achieved", number(e.achieved)}};
    status = kExitAccuracy;
  } catch (const std::exception& e) {
    log << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  try {
    const std::filesystem::path dir(out_dir.empty() ? "." : out_dir);
    std::filesystem::create_directories(dir);
    const auto json_path = dir / (os.stem + ".json");
    write_file(json_path, dump_report(out.report));
    log << "wrote " << json_path.string() << "\n";
    if (os.csv && status == kExitOk) {
      for (const auto& [suffix, text] : out.tables) {
        const auto p = dir / (os.stem + suffix + ".csv");
        write_file(p, text);
        log << "wrote " << p.string() << "\n";
      }
    }
  } catch (const std::exception& e) {
    log << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return status;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Numerical lab for weighted Bergman spaces on the unit ball", "bergman-lab"};
  std::string command, config_path, out_dir = ".";
  int n_threads = 0;
  app.add_option("command", command, "weight-info | norm | equivalence-report | carleson | volterra-verdict | geometry-check")
      ->required();
  app.add_option("--config", config_path, "experiment JSON")->required();
  app.add_option("--out", out_dir, "output directory");
  auto* threads_opt = app.add_option("--threads", n_threads, "worker threads (default: BERGMAN_LAB_THREADS or hardware)")
                          ->check(CLI::PositiveNumber);
  app.set_version_flag("--version", kVersion);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitSchema;
  }
  set_threads(threads_opt->count() ? n_threads : 0);

  json config;
  {
    std::ifstream is(config_path);
    if (!is) {
      std::cerr << "error: cannot open config " << config_path << "\n";
      return kExitSchema;
    }
    try {
      config = json::parse(is);
    } catch (const json::parse_error& e) {
      std::cerr << "error: config: " << e.what() << "\n";
      return kExitSchema;
    }
  }
  std::ostringstream log;
  const int rc = run(command, config, out_dir, log);
  (rc == kExitOk ? std::cout : std::cerr) << log.str();
  return rc;
}

}  // namespace bergman
