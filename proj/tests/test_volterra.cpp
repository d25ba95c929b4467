#include <cmath>
#include <numbers>

#include "bergman/volterra.hpp"
#include "doctest.h"
#include "oracle.hpp"

using namespace bergman;

namespace {

MultiIndex random_index(int n, Rng& rng, int maxdeg) {
  MultiIndex b(n);
  int left = static_cast<int>(rng.uniform() * (maxdeg + 1));
  for (auto& e : b) {
    e = static_cast<int>(rng.uniform() * (left + 1));
    left -= e;
  }
  return b;
}

VolterraSpec light_spec() {
  VolterraSpec s;
  s.lattice.K = 10;
  s.lattice.directions = 8;
  s.operator_K = 6;
  s.operator_samples = 8000;
  s.space_seminorms = false;
  return s;
}

// omega = 1, n = 1: omega^*(r) = (r^2 - 1)/4 - log(r)/2
double star_unit(double r) { return 0.25 * (r * r - 1.0) - 0.5 * std::log(r); }

}  // namespace

TEST_CASE("T_g symbolic examples") {
  auto z1 = HoloFun::monomial({1, 0});
  auto one = HoloFun::constant(2, 1.0);
  const Point z = {cplx(0.3, 0.1), cplx(-0.2, 0.4)};
  CHECK(std::abs(apply_Tg(z1, one, z) - z[0]) < 1e-15);
  CHECK(std::abs(apply_Tg(z1, one, z, {true}) - z[0]) < 1e-14);
  // T_{z^g} z^b = |g|/(|b|+|g|) z^{b+g}
  auto T = tg_symbolic(HoloFun::monomial({2, 1}), HoloFun::monomial({1, 3}));
  auto terms = poly_terms(T);
  REQUIRE(terms.size() == 1);
  CHECK(terms.begin()->first == MultiIndex{3, 4});
  CHECK(std::abs(terms.begin()->second - 3.0 / 7.0) < 1e-16);
  auto c = HoloFun::constant(2, cplx(2.0, -1.0));
  CHECK(is_identically_zero(tg_symbolic(c, z1)));
  CHECK(apply_Tg(c, HoloFun::kernel_power(Point{0.5, 0.0}, 3.0), z) == 0.0);
  CHECK_THROWS_AS(tg_symbolic(c, HoloFun::kernel_power(Point{0.5, 0.0}, 3.0)), DomainError);
}

TEST_CASE("T_g quadrature agrees with the termwise oracle") {
  Rng rng(21);
  int checked = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 3;
    MultiIndex g = random_index(n, rng, 5), b = random_index(n, rng, 5);
    if (degree(g) == 0) g[0] += 1;
    const cplx cg(rng.normal(), rng.normal()), cb(rng.normal(), rng.normal());
    const Point z = scaled(random_sphere(n, rng), 0.99 * std::sqrt(rng.uniform()));
    // oracle: c_g c_b |g|/(|b|+|g|) z^{b+g}
    cplx zz = cg * cb * (double(degree(g)) / (degree(g) + degree(b)));
    for (int j = 0; j < n; ++j) zz *= std::pow(z[j], g[j] + b[j]);
    const auto G = HoloFun::monomial(g, cg), F = HoloFun::monomial(b, cb);
    const cplx sym = apply_Tg(G, F, z);
    const cplx quad = apply_Tg(G, F, z, {true});
    CHECK(std::abs(sym - zz) <= 1e-13 * std::abs(zz) + 1e-300);
    CHECK(std::abs(quad - sym) <= 1e-10 * std::abs(sym) + 1e-300);
    ++checked;
  }
  CHECK(checked == 50);
}

TEST_CASE("T_g linearity and value at the origin") {
  Rng rng(22);
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
  for (const auto& [m, v] : lhs) {
    cplx expect = 0.0;
    if (r1.count(m)) expect += r1.at(m);
    if (r2.count(m)) expect += c * r2.at(m);
    CHECK(std::abs(v - expect) <= 1e-14 * (1.0 + std::abs(v)));
  }
  const Point z0(2, cplx(0.0));
  CHECK(apply_Tg(G, f1, z0) == 0.0);
  CHECK(apply_Tg(G, f1, z0, {true}) == 0.0);
  auto K = HoloFun::kernel_power(Point{0.6, 0.3}, 2.5);
  CHECK(apply_Tg(K, f1, z0) == 0.0);
  const Point z = {cplx(0.2, 0.5), cplx(-0.4, 0.1)};
  const cplx lin = apply_Tg(K, f1 + c * f2, z), sep = apply_Tg(K, f1, z) + c * apply_Tg(K, f2, z);
  CHECK(std::abs(lin - sep) <= 1e-11 * std::abs(sep));
}

TEST_CASE("T_g on a kernel function against the closed form") {
  // g = z_1, f = ((1-|a|^2)/(1-<z,a>))^s: T_g f = z_1 (1-|a|^2)^s ((1-w)^{1-s} - 1)/((s-1) w), w = <z,a>
  const Point a = {cplx(0.9, 0.0), cplx(0.0, 0.3)};
  const double s = 4.5;
  auto F = HoloFun::kernel_power(a, s);
  auto g = HoloFun::monomial({1, 0});
  Rng rng(5);
  for (int i = 0; i < 20; ++i) {
    const Point z = scaled(random_sphere(2, rng), 0.999 * std::pow(rng.uniform(), 0.25));
    const cplx w = inner(z, a);
    const cplx expect = z[0] * std::pow(1.0 - norm2(a), s) * (std::pow(1.0 - w, 1.0 - s) - 1.0) / ((s - 1.0) * w);
    CHECK(std::abs(apply_Tg(g, F, z) - expect) <= 1e-10 * std::abs(expect));
  }
}

TEST_CASE("C^kappa seminorm: constants and the n = 1 oracle") {
  auto w = RadialWeight::power(0.0, false, 1);
  VolterraSpec s = light_spec();
  CHECK(c_kappa_seminorm(HoloFun::constant(1, cplx(3.0, 4.0)), w, 1.0, s) == 5.0);
  auto rep = c_kappa_profile(HoloFun::monomial({1}), w, 1.0, s);
  CHECK(rep.method == "exact_radial");
  for (const auto& smp : rep.samples) {
    const double r = smp.radius;
    const double phi = r == 0.0 ? std::numbers::pi : 2.0 * std::asin(0.5 * (1.0 - r));
    const double lo = r == 0.0 ? 1e-12 : r;
    const double num = (phi / std::numbers::pi) *
                       oracle::simpson([](double t) { return 2.0 * t * t * t * star_unit(t); }, lo, 1.0, 4000);
    const double den = (phi / std::numbers::pi) * (1.0 - r * r);
    CHECK(smp.numerator == doctest::Approx(num).epsilon(1e-8));
    CHECK(smp.omega == doctest::Approx(den).epsilon(1e-10));
  }
  CHECK(std::isfinite(rep.seminorm()));
  CHECK(rep.profile_slope < 0.0);
  // kappa = 3: omega(S_a)^3 vanishes faster than the numerator
  auto big = c_kappa_profile(HoloFun::monomial({1}), w, 3.0, s);
  CHECK(big.profile_slope > 1.0);
  CHECK(big.profile.back().second > 100.0 * big.profile[1].second);
  CHECK_THROWS_AS(c_kappa_profile(HoloFun::monomial({1}), w, 0.5, s), DomainError);
}

TEST_CASE("C^kappa: cap Monte Carlo path against region Monte Carlo") {
  auto w = RadialWeight::power(1.0, false, 2);
  VolterraSpec s = light_spec();
  s.lattice.K = 4;
  s.lattice.directions = 2;
  s.cap_samples = 20000;
  auto g = HoloFun::monomial({1, 1}, 2.0) + HoloFun::monomial({0, 2});
  auto rep = c_kappa_profile(g, w, 1.0, s);
  auto Rg = radial_derivative(g);
  for (std::size_t i = 1; i < rep.samples.size(); i += 5) {
    const auto& smp = rep.samples[i];
    QuadratureSpec qs;
    qs.region_samples = 40000;
    qs.seed = 100 + i;
    auto F = [&](const Point& z) { return std::norm(Rg(z)) * w.star_c(1.0 - norm(z)); };
    const Estimate e = integrate_region(F, Block{smp.a, 0.0}, nullptr, qs);
    CHECK(std::abs(e.value - smp.numerator) < 4.0 * std::hypot(e.error, smp.numerator_error));
  }
}

TEST_CASE("C^kappa is monotone under lattice refinement") {
  auto w = RadialWeight::logpower(2.0, 2);
  auto g = HoloFun::monomial({2, 0}) + HoloFun::monomial({0, 1}, cplx(0.0, 1.0));
  VolterraSpec s = light_spec();
  s.cap_samples = 512;
  double prev = 0.0;
  for (auto [K, D] : {std::pair{3, 4}, {5, 8}, {7, 16}}) {
    s.lattice.K = K;
    s.lattice.directions = D;
    const double v = c_kappa_seminorm(g, w, 1.0, s);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("M_infinity lower bound") {
  CHECK(m_infinity(HoloFun::monomial({1, 0}), 0.7, 16, 20, 1) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(m_infinity(HoloFun::constant(2, 3.0), 0.0, 16, 20, 1) == 3.0);
  const Point a = scaled(normalized(Point{cplx(1.0, 1.0), cplx(0.0, -1.0)}), 0.99);
  const double s = 3.0;
  auto K = HoloFun::kernel_power(a, s);
  for (double r : {0.5, 0.9, 0.999}) {
    const double peak = std::pow((1.0 - norm2(a)) / (1.0 - r * norm(a)), s);
    const double m = m_infinity(K, r, 256, 20, 3);
    CHECK(m <= peak * (1.0 + 1e-12));
    CHECK(m >= peak * (1.0 - 1e-12));
  }
  // a product of two coordinates: max of |z1 z2| on the sphere is 1/2
  const double m2 = m_infinity(HoloFun::monomial({1, 1}), 0.9, 256, 20, 4);
  CHECK(m2 <= 0.81 * 0.5 * (1.0 + 1e-12));
  CHECK(m2 >= 0.81 * 0.5 * 0.99);
}

TEST_CASE("trichotomy: the three worked regimes") {
  VolterraSpec s = light_spec();
  // constant symbol, every regime
  for (auto [n, p, q] : {std::tuple{1, 2.0, 2.0}, {1, 2.0, 4.0}, {2, 1.0, 2.0}}) {
    auto w = RadialWeight::power(0.0, false, n);
    auto r = tg_verdict(HoloFun::constant(n, 2.0), w, p, q, s);
    CHECK(r.bounded);
    CHECK(r.operator_consistent);
    for (const auto& row : r.operator_profile) CHECK(row.quantity == 0.0);
  }
  // n = 2, p = 1, q = 2: n kappa = 1, g = z_1 is unbounded
  {
    auto w = RadialWeight::power(0.0, false, 2);
    auto r = tg_verdict(HoloFun::monomial({1, 0}), w, 1.0, 2.0, s);
    CHECK(r.regime == Regime::ConstantOnly);
    CHECK_FALSE(r.bounded);
    CHECK(r.basis == "symbolic_zero");
    CHECK(r.m_infty_slope > 0.3);
    CHECK(r.m_infty_profile.back().ratio > 10.0 * r.m_infty_profile.front().ratio);
    CHECK(r.operator_slope > 0.0);
    CHECK(r.operator_consistent);
  }
  // n = 1, p = 2, q = 4: kappa = 1/4, g = z is bounded
  {
    auto w = RadialWeight::power(0.0, false, 1);
    auto r = tg_verdict(HoloFun::monomial({1}), w, 2.0, 4.0, s);
    CHECK(r.regime == Regime::GrowthBound);
    CHECK(r.kappa == 0.25);
    CHECK(r.bounded);
    for (const auto& row : r.m_infty_profile) {
      const double expect = row.r * (1.0 - row.r) / std::pow(omega_block_mass_r(w, row.r), 0.25);
      CHECK(row.ratio == doctest::Approx(expect).epsilon(1e-12));
    }
    CHECK(r.m_infty_slope < -0.3);
    CHECK(r.operator_slope <= s.trend_tol);
    CHECK(r.operator_consistent);
  }
}

TEST_CASE("compactness profiles") {
  VolterraSpec s = light_spec();
  auto w = RadialWeight::power(1.0, false, 1);
  auto poly = tg_compact_profile(HoloFun::monomial({2}) + HoloFun::monomial({1}), w, 2.0, 2.0, s);
  CHECK(poly.tail_slope < -1.0);
  CHECK(poly.tail_monotone);
  auto c = tg_compact_profile(HoloFun::constant(1, 1.0), w, 2.0, 2.0, s);
  CHECK(c.tail_slope == 0.0);
  for (const auto& row : c.m_infty_profile) CHECK(row.ratio == 0.0);
  // kernel symbol pinned near the boundary: no decay on the lattice scales
  s.region_samples = 8000;
  auto k = tg_compact_profile(HoloFun::kernel_power(Point{1.0 - std::ldexp(1.0, -14)}, 1.0), w, 2.0, 2.0, s);
  CHECK(k.c1.method == "region_mc");
  CHECK(k.tail_slope > -0.2);
  CHECK_FALSE(k.tail_monotone);
}

TEST_CASE("Bloch and BMOA seminorms") {
  VolterraSpec s = light_spec();
  auto c = space_seminorms(HoloFun::constant(2, cplx(0.0, 2.0)), s);
  CHECK(c.bloch == 2.0);
  CHECK(c.bmoa == 0.0);
  auto z1 = space_seminorms(HoloFun::monomial({1, 0}), s);
  CHECK(z1.bloch == doctest::Approx(2.0 / (3.0 * std::sqrt(3.0))).epsilon(1e-10));
  CHECK(z1.bmoa > 0.0);
  CHECK(std::isfinite(z1.bmoa));
  // inclusion panel on polynomial probes: finite bmoa, finite C^1, finite Bloch
  auto w = RadialWeight::power(0.0, false, 2);
  for (const auto& g : {HoloFun::monomial({1, 0}), HoloFun::monomial({1, 1}), HoloFun::monomial({0, 3}, 2.0)}) {
    auto sn = space_seminorms(g, s);
    const double c1 = c_kappa_seminorm(g, w, 1.0, s);
    CHECK(std::isfinite(sn.bmoa));
    CHECK(std::isfinite(c1));
    CHECK(std::isfinite(sn.bloch));
    CHECK(sn.bmoa < 1e3);
    CHECK(c1 < 1e3);
    CHECK(sn.bloch < 1e3);
  }
}

TEST_CASE("dilation approximation") {
  VolterraSpec s = light_spec();
  auto w = RadialWeight::power(0.0, false, 1);
  auto g = HoloFun::monomial({1}, cplx(1.0, 2.0));
  const double base = c_kappa_seminorm(g, w, 1.0, s);
  auto prof = dilation_approx_profile(g, w, {0.5, 0.9, 0.99, 0.999, 1.0}, s);
  for (const auto& [r, v] : prof) {
    // g - g_r = (1-r) g and the seminorm is quadratic
    CHECK(v == doctest::Approx((1.0 - r) * (1.0 - r) * base).epsilon(1e-9));
  }
  CHECK(prof.back().second == 0.0);
  auto g2 = HoloFun::monomial({3}) + HoloFun::monomial({1});
  auto p2 = dilation_approx_profile(g2, w, {0.9, 0.99, 0.999}, s);
  CHECK(p2[1].second < p2[0].second);
  CHECK(p2[2].second < p2[1].second);
}

TEST_CASE("verdicts are reproducible across thread counts") {
  VolterraSpec s = light_spec();
  s.operator_K = 3;
  auto w = RadialWeight::power(0.0, false, 2);
  set_threads(1);
  auto a = tg_verdict(HoloFun::monomial({1, 1}), w, 2.0, 2.0, s);
  set_threads(3);
  auto b = tg_verdict(HoloFun::monomial({1, 1}), w, 2.0, 2.0, s);
  set_threads(0);
  CHECK(a.c_kappa_seminorm == b.c_kappa_seminorm);
  CHECK(a.operator_slope == b.operator_slope);
  CHECK(a.m_infty_slope == b.m_infty_slope);
  CHECK(a.inputs_hash == b.inputs_hash);
}
