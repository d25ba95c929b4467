// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "bergman/carleson.hpp"
#include "bergman/cli.hpp"
#include "bergman/geometry.hpp"
#include "bergman/norms.hpp"
#include "bergman/volterra.hpp"

using namespace bergman;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

std::vector<RadialWeight> families(int n) {
  return {RadialWeight::power(0.0, false, n), RadialWeight::power(1.0, false, n), RadialWeight::logpower(2.0, n)};
}

HoloFun random_poly(int n, Rng& rng, int maxdeg) {
  PolyMap t;
  const int terms = 1 + static_cast<int>(rng.uniform() * 5);
  for (int i = 0; i < terms; ++i) {
    MultiIndex b(n);
    int left = static_cast<int>(rng.uniform() * (maxdeg + 1));
    for (auto& e : b) {
      e = static_cast<int>(rng.uniform() * (left + 1));
      left -= e;
    }
    t[b] += cplx(rng.normal(), rng.normal());
  }
  t[MultiIndex(n, 0)] += cplx(rng.normal(), rng.normal());
  MultiIndex e1(n, 0);
  e1[0] = 1;
  t[e1] += cplx(rng.normal(), rng.normal());
  return HoloFun::poly(n, t);
}

// slope of log(y) against log(1/(1-r)) over the second half of the panel
double tail_slope(const std::vector<double>& r, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = r.size() / 2; i < r.size(); ++i) {
    lx.push_back(-std::log1p(-r[i]));
    ly.push_back(std::log(y[i]));
  }
  return ls_slope(lx, ly);
}

std::string g3(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.3g", v);
  return b;
}

// ---- 1 ----------------------------------------------------------------------

void lp_identity(Verdict& v) {
  const auto w0 = RadialWeight::power(0.0, false, 1);
  const double lhs0 = bergman_norm_p(HoloFun::monomial({1}), w0, 2.0).value;
  const double rhs0 = lp_identity_rhs(HoloFun::monomial({1}), w0, 2.0).value;
  v.require(std::abs(lhs0 - 0.5) <= 1e-6 * 0.5 && std::abs(rhs0 - 0.5) <= 1e-6 * 0.5, "anchor z, n = 1: both sides 1/2");
  Rng rng(101);
  double worst = 0.0;
  int checked = 0;
  for (int i = 0; i < 20; ++i) {
    const int n = 1 + i % 2;
    // degree <= 6 with at least a linear term, so f - f(0) is nonzero
    HoloFun f = random_poly(n, rng, 6);
    for (const auto& w : families(n)) {
      const double lhs = bergman_norm_p(subtract_value_at_zero(f), w, 2.0).value;
      const double rhs = lp_identity_rhs(f, w, 2.0).value;
      worst = std::max(worst, std::abs(lhs - rhs) / lhs);
      ++checked;
    }
  }
  v.require(worst <= 1e-6, "relative gap <= 1e-6");
  v.detail << "anchor lhs=" << g3(lhs0) << " rhs=" << g3(rhs0) << "; " << checked
           << " (function, weight) pairs, max rel gap " << g3(worst);
}

// ---- 2 ----------------------------------------------------------------------

void block_volume(Verdict& v) {
  double spread = 0.0, slope = 0.0;
  for (int n : {1, 2})
    for (const auto& w : families(n)) {
      std::vector<double> rs, qs;
      for (int k = 1; k <= 20; ++k) {
        const double r = 1.0 - std::ldexp(1.0, -k);
        rs.push_back(r);
        qs.push_back(omega_block_mass(w, scaled(unit_vector(n, 0), r)) / (std::pow(1.0 - r, n) * w.hat(r)));
      }
      const BracketCheck b = bracket_check(rs, qs, 50.0, 0.1);
      v.require(b.ok, w.describe());
      spread = std::max(spread, b.spread);
      slope = std::max(slope, std::abs(b.slope));
    }
  v.detail << "k = 1..20, n = 1, 2, three families: max spread " << g3(spread) << " (<= 50), max |slope| "
           << g3(slope) << " (<= 0.1)";
}

// ---- 3 ----------------------------------------------------------------------

void cap_law(Verdict& v) {
  const double anchor = cap_measure(1.0, 1);
  v.require(std::abs(anchor - 1.0 / 3.0) <= 1e-10, "n = 1 arc value 1/3 at r = 1");
  double worst_shift = 0.0;
  for (int n : {1, 2, 3}) {
    // bracket of sigma(Q)/r^{2n} over r = sqrt2 2^{-j/m}, j <= 24 m
    auto bracket = [n](int m) {
      double lo = INFINITY, hi = 0.0;
      for (int j = 0; j <= 24 * m; ++j) {
        const double r = std::sqrt(2.0) * std::exp2(-static_cast<double>(j) / m);
        const double q = cap_measure(r, n) / std::pow(r, 2 * n);
        lo = std::min(lo, q);
        hi = std::max(hi, q);
      }
      return std::pair{lo, hi};
    };
    const auto [lo1, hi1] = bracket(16);
    const auto [lo2, hi2] = bracket(32);
    v.require(lo1 > 0.0 && std::isfinite(hi1), "two-sided bracket, n = " + std::to_string(n));
    const double shift = std::max(std::abs(lo2 - lo1) / lo1, std::abs(hi2 - hi1) / hi1);
    v.require(shift < 5e-4, "3 digits under refinement, n = " + std::to_string(n));
    worst_shift = std::max(worst_shift, shift);
    v.detail << "n=" << n << " [" << g3(lo2) << ", " << g3(hi2) << "] ";
  }
  v.detail << "; refinement shift " << g3(worst_shift) << "; arc(1) - 1/3 = " << g3(anchor - 1.0 / 3.0);
}

// ---- 4 ----------------------------------------------------------------------

void test_function_norms(Verdict& v) {
  double spread = 0.0, tail = 0.0, full = 0.0;
  for (int n : {1, 2})
    for (const auto& w : families(n)) {
      const Point e = normalized(Point(n, cplx(0.6, 0.8)));
      for (double p : {1.0, 2.0, 4.0}) {
        std::vector<double> rs, qs;
        for (int k = 1; k <= 14; ++k) {
          const Point a = scaled(e, 1.0 - std::ldexp(1.0, -k));
          const NormReport r = bergman_norm_p(test_function(a, p, w).f, w, p);
          rs.push_back(norm(a));
          qs.push_back(r.value / omega_block_mass(w, a));
        }
        const BracketCheck b = bracket_check(rs, qs, 100.0, INFINITY);
        const double t = tail_slope(rs, qs);
        v.require(b.spread <= 100.0 && std::abs(t) <= 0.1, w.describe() + " p=" + g3(p));
        spread = std::max(spread, b.spread);
        tail = std::max(tail, std::abs(t));
        full = std::max(full, std::abs(b.slope));
      }
    }
  v.detail << "p = 1, 2, 4, |a| <= 1-2^-14, n = 1, 2, three families: max spread " << g3(spread)
           << " (<= 100), max |tail slope| " << g3(tail) << " (<= 0.1); full-range |slope| up to " << g3(full);
}

// ---- 5 ----------------------------------------------------------------------

void carleson(Verdict& v) {
  double dev = 0.0, slope = -INFINITY;
  for (int n : {1, 2}) {
    CarlesonLattice lat;
    lat.K = n == 1 ? 14 : 10;
    lat.directions = n == 1 ? 16 : 8;
    for (const auto& w : families(n)) {
      const CarlesonReport one = carleson_quotient(Measure::weighted(w), w, 2.0, 2.0, lat);
      dev = std::max(dev, std::abs(one.sup_estimate - 1.0));
      const CarlesonReport van =
          carleson_quotient(Measure::weighted(w, [](double c) { return c; }), w, 2.0, 2.0, lat);
      slope = std::max(slope, van.profile_slope);
    }
  }
  v.require(dev <= 1e-12, "omega dV quotient 1 to 1e-12");
  v.require(slope <= -0.8, "vanishing profile slope <= -0.8");
  v.detail << "|sup - 1| max " << g3(dev) << "; (1-|z|) omega dV profile slopes <= " << g3(slope);
}

// ---- 6 ----------------------------------------------------------------------

MultiIndex random_index(int n, Rng& rng, int maxdeg) {
  MultiIndex b(n);
  int left = static_cast<int>(rng.uniform() * (maxdeg + 1));
  for (auto& e : b) {
    e = static_cast<int>(rng.uniform() * (left + 1));
    left -= e;
  }
  return b;
}

void volterra_agreement(Verdict& v) {
  Rng rng(606);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const int n = 1 + i % 3;
    MultiIndex g = random_index(n, rng, 5), b = random_index(n, rng, 5);
    if (degree(g) == 0) g[0] += 1;
    const auto G = HoloFun::monomial(g, cplx(rng.normal(), rng.normal()));
    const auto F = HoloFun::monomial(b, cplx(rng.normal(), rng.normal()));
    const Point z = scaled(random_sphere(n, rng), 0.99 * std::sqrt(rng.uniform()));
    const cplx sym = apply_Tg(G, F, z);
    const cplx quad = apply_Tg(G, F, z, {true});
    worst = std::max(worst, std::abs(quad - sym) / std::abs(sym));
  }
  v.require(worst <= 1e-10, "50 monomial pairs at 1e-10");

  // linearity of the symbolic map, coefficientwise
  PolyMap a, b, g;
  for (int i = 0; i < 4; ++i) {
    a[random_index(2, rng, 4)] += cplx(rng.normal(), rng.normal());
    b[random_index(2, rng, 4)] += cplx(rng.normal(), rng.normal());
    g[random_index(2, rng, 3)] += cplx(rng.normal(), rng.normal());
  }
  const auto f1 = HoloFun::poly(2, a), f2 = HoloFun::poly(2, b), G = HoloFun::poly(2, g);
  const cplx c(0.7, -1.3);
  const auto lhs = poly_terms(tg_symbolic(G, f1 + c * f2));
  const auto r1 = poly_terms(tg_symbolic(G, f1)), r2 = poly_terms(tg_symbolic(G, f2));
  double lin = 0.0;
  for (const auto& [m, val] : lhs) {
    cplx expect = 0.0;
    if (r1.count(m)) expect += r1.at(m);
    if (r2.count(m)) expect += c * r2.at(m);
    lin = std::max(lin, std::abs(val - expect) / (1.0 + std::abs(val)));
  }
  v.require(lin <= 1e-14, "linearity up to rounding of the coefficients");
  const Point z0(2, cplx(0.0));
  const auto K = HoloFun::kernel_power(Point{0.6, 0.3}, 2.5);
  const bool zero = apply_Tg(G, f1, z0) == 0.0 && apply_Tg(G, f1, z0, {true}) == 0.0 && apply_Tg(K, f1, z0) == 0.0 &&
                    apply_Tg(K, f1, z0, {true}) == 0.0;
  v.require(zero, "T_g f(0) == 0");
  v.detail << "50 pairs max rel err " << g3(worst) << "; linearity residual " << g3(lin)
           << "; T_g f(0) exactly 0: " << (zero ? "yes" : "no");
}

// ---- 7 ----------------------------------------------------------------------

void trichotomy(Verdict& v) {
  VolterraSpec s;
  s.lattice.K = 10;
  s.lattice.directions = 8;
  s.space_seminorms = false;
  auto slope_agrees = [](const SymbolReport& r) {
    return r.bounded ? r.operator_slope <= 0.1 : r.operator_slope > 0.0;
  };
  for (auto [n, p, q] : {std::tuple{1, 2.0, 2.0}, {1, 2.0, 4.0}, {2, 1.0, 2.0}}) {
    const SymbolReport r = tg_verdict(HoloFun::constant(n, 2.0), RadialWeight::power(0.0, false, n), p, q, s);
    bool zero = true;
    for (const auto& row : r.operator_profile) zero = zero && row.quantity == 0.0;
    v.require(r.bounded && zero && r.operator_consistent && slope_agrees(r),
              "constant symbol, regime " + regime_id(r.regime));
  }
  v.detail << "constants bounded with zero quotients in all regimes; ";
  const SymbolReport u = tg_verdict(HoloFun::monomial({1, 0}), RadialWeight::power(0.0, false, 2), 1.0, 2.0, s);
  v.require(u.regime == Regime::ConstantOnly && !u.bounded, "n=2, p=1, q=2, g=z1 unbounded");
  v.require(u.m_infty_profile.back().ratio > 10.0 * u.m_infty_profile.front().ratio, "growing ratio profile");
  v.require(u.operator_consistent && slope_agrees(u), "operator slope > 0");
  const SymbolReport b = tg_verdict(HoloFun::monomial({1}), RadialWeight::power(0.0, false, 1), 2.0, 4.0, s);
  v.require(b.regime == Regime::GrowthBound && b.bounded, "n=1, p=2, q=4, g=z bounded");
  v.require(b.operator_consistent && slope_agrees(b), "operator slope <= trend_tol");
  v.detail << "z1 (n=2,p=1,q=2): unbounded, M-ratio slope " << g3(u.m_infty_slope) << ", operator slope "
           << g3(u.operator_slope) << "; z (n=1,p=2,q=4): bounded, M-ratio slope " << g3(b.m_infty_slope)
           << ", operator slope " << g3(b.operator_slope);
}

// ---- 8 ----------------------------------------------------------------------

void maximal_inequality(Verdict& v) {
  NormSpec ns;
  ns.outer_samples = 4000;
  ns.candidates = 64;
  Rng rng(808);
  int checked = 0;
  double worst_ratio = INFINITY;
  for (int i = 0; i < 6; ++i) {
    const int n = 1 + i % 2;
    const HoloFun f = random_poly(n, rng, 4);
    for (const auto& w : families(n)) {
      const double lp = bergman_norm_p(f, w, 2.0).value;
      const NormReport M = maxfun_norm(f, w, 2.0, 4.0, ns);
      v.require(lp <= M.value + 3.0 * M.error, "left inequality, " + w.describe());
      worst_ratio = std::min(worst_ratio, (M.value + 3.0 * M.error) / lp);
      ++checked;
    }
  }
  v.detail << checked << " (polynomial, weight) pairs: min (N-norm + 3 sigma)/||f||^p " << g3(worst_ratio) << "; ";

  // right inequality: N-norm / ||F_a||^p along a = (1 - 2^-k) e_1
  const auto w = RadialWeight::power(1.0, false, 1);
  std::vector<double> rs, qs;
  for (int k = 1; k <= 10; ++k) {
    const Point a = real_point({1.0 - std::ldexp(1.0, -k)});
    const HoloFun F = test_function(a, 2.0, w).f;
    const NormReport M = maxfun_norm(F, w, 2.0, 4.0, ns);
    rs.push_back(norm(a));
    qs.push_back(M.value / bergman_norm_p(F, w, 2.0).value);
  }
  const BracketCheck b = bracket_check(rs, qs, 100.0, INFINITY);
  const double t = tail_slope(rs, qs);
  v.require(b.spread <= 100.0 && std::abs(t) <= 0.1, "right-inequality panel bounded and trend-free");
  v.detail << "test-function panel N/||F||^p in [" << g3(b.min) << ", " << g3(b.max) << "], tail slope " << g3(t);
}

// ---- 9 ----------------------------------------------------------------------

void geometry(Verdict& v) {
  const long N = 100000;
  long total = 0, bad = 0;
  for (int n : {1, 2, 3}) {
    const ComparisonReport tb = tube_block_comparison_check(N, 900 + n, n);
    const PredicateCheck ad = admissible_dilation_check(N, 910 + n, n);
    const PredicateCheck tn = tent_in_block_check(N, 920 + n, n);
    for (const PredicateCheck* c : {&tb.tube_in_block, &tb.block_in_tube, &ad, &tn}) {
      v.require(c->samples >= N && c->counterexamples == 0, c->name + " n=" + std::to_string(n));
      total += c->samples;
      bad += c->counterexamples;
    }
  }
  v.detail << "4 predicates x n = 1, 2, 3, " << N << " samples each (" << total << " total): " << bad
           << " counterexamples";
}

// ---- 10 ---------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

void determinism(Verdict& v) {
  const fs::path root = fs::temp_directory_path() / "bergman_acceptance_determinism";
  fs::remove_all(root);
  int files = 0, configs = 0;
  for (const auto& entry : fs::directory_iterator(BERGMAN_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    std::ifstream is(entry.path());
    const json cfg = json::parse(is);
    const std::string cmd = cfg.at("command").get<std::string>();
    const std::string stem = entry.path().stem().string();
    std::vector<fs::path> dirs;
    for (int t : {1, 3, 8}) {
      set_threads(t);
      const fs::path d = root / (stem + "_t" + std::to_string(t));
      std::ostringstream log;
      v.require(run(cmd, cfg, d.string(), log) == 0, stem + " ran");
      dirs.push_back(d);
    }
    set_threads(0);
    ++configs;
    for (const auto& f : fs::directory_iterator(dirs[0])) {
      const std::string ref = slurp(f.path());
      for (std::size_t i = 1; i < dirs.size(); ++i)
        v.require(slurp(dirs[i] / f.path().filename()) == ref, f.path().filename().string() + " identical");
      ++files;
    }
  }
  v.require(configs > 0, "configs found");
  v.detail << configs << " configs, " << files << " report files byte-identical across 1, 3, 8 threads";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Verdict&)>>> criteria = {
      {"Littlewood-Paley identity", lp_identity},
      {"block-volume comparability", block_volume},
      {"cap-measure law", cap_law},
      {"test-function norms", test_function_norms},
      {"Carleson sanity", carleson},
      {"T_g symbolic/quadrature agreement", volterra_agreement},
      {"T_g trichotomy consistency", trichotomy},
      {"maximal-function inequalities", maximal_inequality},
      {"geometry predicates", geometry},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(v);
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!v.pass) ++failed;
    std::printf("%s %2zu %s: %s (%.1fs)\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                v.detail.str().c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
