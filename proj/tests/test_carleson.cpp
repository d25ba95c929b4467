#include <algorithm>
#include <cmath>
#include <set>

#include "bergman/carleson.hpp"
#include "doctest.h"
#include "oracle.hpp"

using namespace bergman;

namespace {

CarlesonLattice small_lattice(int K, int dirs = 0) {
  CarlesonLattice l;
  l.K = K;
  l.directions = dirs;
  return l;
}

std::string key(const Point& a) {
  std::string s;
  for (auto c : a) s += std::to_string(c.real()) + "," + std::to_string(c.imag()) + ";";
  return s;
}

}  // namespace

TEST_CASE("lattice shape and nesting") {
  auto l1 = carleson_lattice(1, small_lattice(14));
  CHECK(l1.size() == 1 + 14 * 16);
  CHECK(norm(l1[0]) == 0.0);
  bool has_plus = false, has_minus = false;
  for (const auto& a : l1) {
    if (std::abs(a[0] - cplx(0.5, 0.0)) < 1e-15) has_plus = true;
    if (std::abs(a[0] - cplx(-0.5, 0.0)) < 1e-15) has_minus = true;
  }
  CHECK(has_plus);
  CHECK(has_minus);
  auto l2 = carleson_lattice(2, small_lattice(3));
  CHECK(l2.size() == 1 + 3 * 66);
  for (int n : {1, 2}) {
    auto coarse = carleson_lattice(n, small_lattice(4, n == 1 ? 8 : 16));
    auto fine = carleson_lattice(n, small_lattice(6, n == 1 ? 16 : 32));
    std::set<std::string> f;
    for (const auto& a : fine) f.insert(key(a));
    for (const auto& a : coarse) CHECK(f.count(key(a)) == 1);
  }
  CHECK_THROWS_AS(carleson_lattice(1, small_lattice(0)), ConfigError);
}

TEST_CASE("mu = omega dV gives quotient 1 on the shared path") {
  for (int n : {1, 2}) {
    for (const auto& w : {RadialWeight::power(0.0, false, n), RadialWeight::logpower(2.0, n)}) {
      auto mu = Measure::weighted(w);
      auto rep = carleson_quotient(mu, w, 2.0, 2.0, small_lattice(14, n == 1 ? 16 : 8));
      for (const auto& s : rep.samples) CHECK(s.quotient == 1.0);
      CHECK(rep.sup_estimate == 1.0);
      CHECK(rep.degenerate_count == 0);
      // the shared path agrees with the block mass of the weights module
      for (const auto& s : rep.samples) CHECK(s.omega == doctest::Approx(omega_block_mass(w, s.a)).epsilon(1e-10));
    }
  }
  // q > p: quotient omega(S_a)^{1 - q/p}
  auto w = RadialWeight::power(1.0, false, 1);
  auto rep = carleson_quotient(Measure::weighted(w), w, 1.0, 2.0, small_lattice(6, 4));
  for (const auto& s : rep.samples) CHECK(s.quotient == doctest::Approx(1.0 / s.omega).epsilon(1e-14));
}

TEST_CASE("point mass at the origin") {
  for (int n : {1, 2}) {
    auto w = RadialWeight::power(0.0, false, n);
    auto mu = Measure::point_masses({{Point(n, cplx(0.0)), 1.0}});
    for (double q : {1.0, 3.0}) {
      auto rep = carleson_quotient(mu, w, 1.0, q, small_lattice(10, n == 1 ? 16 : 4));
      CHECK(rep.samples[0].quotient == doctest::Approx(1.0 / std::pow(w.ball_mass(), q)).epsilon(1e-14));
      for (std::size_t i = 1; i < rep.samples.size(); ++i) CHECK(rep.samples[i].quotient == 0.0);
    }
  }
}

TEST_CASE("vanishing measure (1-|z|) omega dV") {
  // omega = 1, n = 1: mu(S_a)/omega(S_a) = int_r^1 (1-t) t dt / int_r^1 t dt
  auto w = RadialWeight::power(0.0, false, 1);
  auto mu = Measure::weighted(w, [](double c) { return c; }, {}, "vanishing");
  auto rep = carleson_quotient(mu, w, 2.0, 2.0, small_lattice(14, 16));
  for (const auto& s : rep.samples) {
    const double r = s.radius;
    const double num = oracle::simpson([](double t) { return (1.0 - t) * t; }, r, 1.0, 2000);
    const double den = oracle::simpson([](double t) { return t; }, r, 1.0, 2000);
    CHECK(s.quotient == doctest::Approx(num / den).epsilon(1e-9));
    if (r > 0.0) CHECK(s.quotient <= 1.0 - r);
  }
  CHECK(rep.profile_slope <= -0.8);
  CHECK(rep.profile_slope >= -1.2);
  for (int n : {1, 2}) {
    auto wl = RadialWeight::logpower(2.0, n);
    auto ml = Measure::weighted(wl, [](double c) { return c; });
    auto r2 = carleson_quotient(ml, wl, 2.0, 2.0, small_lattice(14, n == 1 ? 16 : 4));
    CHECK(r2.profile_slope <= -0.8);
    for (const auto& s : r2.samples)
      if (s.radius > 0.0) CHECK(s.quotient <= (1.0 - s.radius) * (1.0 + 1e-12));
  }
}

TEST_CASE("refining the lattice never lowers the sup") {
  Rng rng(11);
  for (int n : {1, 2}) {
    auto w = RadialWeight::power(1.0, false, n);
    std::vector<std::pair<Point, double>> atoms;
    for (int i = 0; i < 40; ++i) {
      const double r = 1.0 - std::pow(rng.uniform(), 3.0);
      atoms.push_back({scaled(random_sphere(n, rng), std::min(r, 1.0 - 1e-9)), rng.uniform() + 0.1});
    }
    auto mu = Measure::point_masses(atoms);
    double prev = 0.0;
    for (auto [K, D] : {std::pair{4, 4}, {6, 8}, {8, 16}, {10, 32}}) {
      const double s = carleson_quotient(mu, w, 1.0, 1.0, small_lattice(K, D)).sup_estimate;
      CHECK(s >= prev);
      prev = s;
    }
  }
}

TEST_CASE("scaling") {
  auto w = RadialWeight::power(0.0, false, 2);
  Rng rng(3);
  std::vector<std::pair<Point, double>> atoms;
  for (int i = 0; i < 30; ++i) atoms.push_back({scaled(random_sphere(2, rng), 0.99 * rng.uniform()), 1.0});
  auto mu = Measure::point_masses(atoms);
  const auto lat = small_lattice(6, 8);
  const double s1 = carleson_quotient(mu, w, 2.0, 2.0, lat).sup_estimate;
  const double s3 = carleson_quotient(mu.scaled(3.0), w, 2.0, 2.0, lat).sup_estimate;
  CHECK(s3 == 3.0 * s1);

  QuadratureSpec qs;
  qs.region_samples = 20000;
  auto md = Measure::density(2, [](const Point& z) { return 1.0 + std::norm(z[0]); }, qs, "density");
  const auto l2 = small_lattice(3, 2);
  auto a = carleson_quotient(md, w, 2.0, 2.0, l2);
  auto b = carleson_quotient(md.scaled(2.5), w, 2.0, 2.0, l2);
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    CHECK(b.samples[i].mu == doctest::Approx(2.5 * a.samples[i].mu).epsilon(1e-14));
  }
}

TEST_CASE("density measures by region Monte Carlo") {
  // rho = 1 against omega = 1: same blocks as the weighted path, within 4 sigma
  auto w = RadialWeight::power(0.0, false, 1);
  QuadratureSpec qs;
  qs.region_samples = 40000;
  auto md = Measure::density(1, [](const Point&) { return 1.0; }, qs);
  CHECK(md.total() == doctest::Approx(1.0).epsilon(1e-9));
  auto rep = carleson_quotient(md, w, 2.0, 2.0, small_lattice(8, 4));
  for (const auto& s : rep.samples) {
    CHECK(std::abs(s.quotient - 1.0) * s.omega <= 4.0 * s.mu_error + 1e-12);
    CHECK(s.mu_error < 0.05 * s.mu);
  }
  CHECK_THROWS_AS(Measure::density(1, [](const Point&) { return -1.0; }, qs), DomainError);
  CHECK_THROWS_AS(carleson_quotient(md, w, 2.0, 1.0), DomainError);
  CHECK_THROWS_AS(carleson_quotient(md, RadialWeight::power(0.0, false, 2), 2.0, 2.0), DomainError);
}

TEST_CASE("angular factor uses cap Monte Carlo") {
  // g(xi) = |xi_1|^2 on the whole sphere averages to 1/n
  auto w = RadialWeight::power(0.0, false, 2);
  auto mu = Measure::weighted(w, {}, [](const Point& xi) { return std::norm(xi[0]); });
  auto e = mu.block_mass(Point(2, cplx(0.0)), 5);
  CHECK(std::abs(e.value - 0.5 * w.ball_mass()) < 4.0 * e.error);
  // near e_1 the factor is close to 1
  const Point a = scaled(unit_vector(2, 0), 1.0 - 1.0 / 1024);
  auto b = mu.block_mass(a, 6);
  CHECK(b.value / block_mass_shared(w, a) > 0.99);
}

TEST_CASE("embedding lower bound") {
  auto lat = small_lattice(8, 4);
  for (int n : {1, 2}) {
    auto w = RadialWeight::power(0.0, false, n);
    auto panel = embedding_panel(Measure::weighted(w), w, 2.0, 2.0, n == 1 ? lat : small_lattice(6, 2));
    double lo = 1e300, hi = 0.0;
    for (const auto& [a, v] : panel) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    CHECK(hi / lo <= 100.0);
    CHECK(lo > 0.01);
    CHECK(hi < 100.0);
  }
  auto w = RadialWeight::power(0.0, false, 1);
  CHECK(embedding_lower_bound(Measure::zero(1), w, 2.0, 2.0, lat) == 0.0);

  // single atom at a lattice point
  const Point a0 = {cplx(0.0, 1.0 - 1.0 / 64)};
  const double m = 0.7, q = 3.0, p = 2.0;
  auto mu = Measure::point_masses({{a0, m}});
  const auto tf = test_function(a0, p, w);
  const double direct = m * std::pow(std::abs(tf.f(a0)), q) / std::pow(omega_block_mass(w, a0), q / p);
  const double lb = embedding_lower_bound(mu, w, p, q, small_lattice(8, 16));
  CHECK(lb >= direct * (1.0 - 1e-9));
}

TEST_CASE("embedding and quotient panels differ by a bounded offset") {
  auto w = RadialWeight::power(1.0, false, 1);
  auto lat = small_lattice(8, 4);
  std::vector<double> offsets;
  for (double s : {0.0, 0.5, 1.0}) {
    auto mu = Measure::weighted(w, [s](double c) { return std::pow(c, s); });
    const double sup = carleson_quotient(mu, w, 2.0, 2.0, lat).sup_estimate;
    const double emb = embedding_lower_bound(mu, w, 2.0, 2.0, lat);
    offsets.push_back(std::log(emb) - std::log(sup));
  }
  Rng rng(8);
  std::vector<std::pair<Point, double>> atoms;
  for (int i = 0; i < 20; ++i) atoms.push_back({{std::polar(1.0 - std::ldexp(1.0, -1 - i % 8), rng.uniform() * 6.28)}, 1e-3});
  auto mp = Measure::point_masses(atoms);
  offsets.push_back(std::log(embedding_lower_bound(mp, w, 2.0, 2.0, lat)) -
                    std::log(carleson_quotient(mp, w, 2.0, 2.0, lat).sup_estimate));
  const double spread = *std::max_element(offsets.begin(), offsets.end()) -
                        *std::min_element(offsets.begin(), offsets.end());
  CHECK(spread < std::log(100.0));
}

TEST_CASE("maximal-function probe") {
  auto w = RadialWeight::power(0.0, false, 1);
  ProbeSpec ps;
  ps.radial_depth = 5;
  ps.directions = 4;
  ps.candidates = 6;
  ps.samples_per_block = 100;
  auto lat = small_lattice(6, 4);
  const std::vector<Probe> one{{"one", [](const Point&) { return 1.0; }}};
  for (auto mu : {Measure::weighted(w), Measure::weighted(w, [](double c) { return c; }),
                  Measure::point_masses({{Point{0.3}, 2.0}})}) {
    for (auto [p, q] : {std::pair{2.0, 2.0}, {1.0, 3.0}}) {
      auto rep = maximal_embedding_probe(one, mu, w, p, q, 1.5, ps, lat);
      const double expect = std::pow(mu.total(), 1.0 / q) / std::pow(w.ball_mass(), 1.0 / p);
      CHECK(rep.rows[0].ratio == doctest::Approx(expect).epsilon(1e-8));
    }
  }
  CHECK_THROWS_AS(maximal_embedding_probe(one, Measure::weighted(w), w, 2.0, 2.0, 0.5, ps, lat), DomainError);

  // localized probes: bounded ratios for omega dV, decaying ones for (1-|z|) omega dV
  std::vector<Probe> local;
  for (int k : {1, 3, 5}) {
    const Point a = {1.0 - std::ldexp(1.0, -k)};
    auto F = test_function(a, 2.0, w).f;
    local.push_back({"F" + std::to_string(k), [F](const Point& z) { return std::norm(F(z)); }, a});
  }
  auto same = maximal_embedding_probe(local, Measure::weighted(w), w, 2.0, 2.0, 1.0, ps, lat);
  auto van = maximal_embedding_probe(local, Measure::weighted(w, [](double c) { return c; }), w, 2.0, 2.0, 1.0, ps, lat);
  for (const auto& r : same.rows) {
    CHECK(r.ratio > 0.05);
    CHECK(r.ratio < 20.0);
  }
  CHECK(van.rows[1].ratio < van.rows[0].ratio);
  CHECK(van.rows[2].ratio < van.rows[1].ratio);
  CHECK(van.rows[2].ratio / same.rows[2].ratio < 0.5 * van.rows[0].ratio / same.rows[0].ratio);
}

TEST_CASE("determinism across thread counts") {
  auto w = RadialWeight::power(0.0, false, 2);
  QuadratureSpec qs;
  qs.region_samples = 4000;
  auto md = Measure::density(2, [](const Point& z) { return std::norm(z[1]); }, qs);
  set_threads(1);
  auto a = carleson_quotient(md, w, 2.0, 2.0, small_lattice(3, 2));
  set_threads(4);
  auto b = carleson_quotient(md, w, 2.0, 2.0, small_lattice(3, 2));
  set_threads(0);
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) CHECK(a.samples[i].mu == b.samples[i].mu);
  CHECK(a.inputs_hash == b.inputs_hash);
}
