#include "bergman/carleson.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "bergman/geometry.hpp"
#include "bergman/holo.hpp"

namespace bergman {

namespace {

// 2n int_{|a|}^1 t^{2n-1} h(1-t) omega(t) dt, h = 1 when empty
double radial_block(const RadialWeight& w, const Measure::RadialFactor& h, double ra) {
  const int p = 2 * w.n() - 1;
  const double ca = ra == 0.0 ? 1.0 : 1.0 - ra;
  double v;
  if (h)
    v = w.integrate_tc([&](double t, double c) { return std::pow(t, p) * h(c); }, ca);
  else
    v = w.integrate_tc([&](double t, double) { return std::pow(t, p); }, ca);
  return 2.0 * w.n() * v;
}

double block_cap(double ra, int n) { return ra == 0.0 ? 1.0 : cap_measure(std::sqrt(1.0 - ra), n); }

std::string point_key(const Point& a) {
  std::ostringstream os;
  os << std::hexfloat;
  for (const auto& c : a) os << c.real() << ',' << c.imag() << ';';
  return os.str();
}

std::uint64_t point_seed(std::uint64_t seed, const Point& a) { return derive_seed(seed, fnv1a64(point_key(a))); }

void check_exponents(double p, double q) {
  if (!(p > 0.0) || !std::isfinite(p)) throw DomainError("p must be positive");
  if (!(q >= p) || !std::isfinite(q)) throw DomainError("q must satisfy q >= p");
}

void check_dims(const Measure& mu, const RadialWeight& w) {
  if (mu.n() != w.n()) throw DomainError("measure and weight live in different dimensions");
}

std::uint64_t report_hash(const Measure& mu, const RadialWeight& w, double p, double q, const CarlesonLattice& lat) {
  std::ostringstream os;
  os << std::hexfloat << "carleson|" << mu.label() << '|' << static_cast<int>(mu.kind()) << '|' << mu.factor() << '|'
     << mu.total() << '|' << fingerprint(w) << '|' << p << '|' << q << '|' << lat.K << '|'
     << lat.directions << '|' << lat.seed;
  return fnv1a64(os.str());
}

}  // namespace

// ---- Measure -----------------------------------------------------------------

Measure Measure::weighted(const RadialWeight& w, RadialFactor h, AngularFactor g, std::string label) {
  Measure m;
  m.kind_ = Kind::Weighted;
  m.n_ = w.n();
  m.label_ = std::move(label);
  m.weight_ = std::make_shared<const RadialWeight>(w);
  m.h_ = std::move(h);
  m.g_ = std::move(g);
  double ang = 1.0;
  if (m.g_) {
    const SphereRule sr = sphere_mc(m.n_, m.spec_.sphere_samples, m.spec_.seed);
    ang = 0.0;
    for (std::size_t i = 0; i < sr.nodes.size(); ++i) ang += sr.weights[i] * m.g_(sr.nodes[i]);
  }
  m.total_ = radial_block(w, m.h_, 0.0) * ang;
  if (!(m.total_ >= 0.0) || !std::isfinite(m.total_)) throw DomainError("weighted measure has invalid total mass");
  return m;
}

Measure Measure::density(int n, BallIntegrand rho, const QuadratureSpec& spec, std::string label) {
  if (n < 1) throw DomainError("dimension must be >= 1");
  Measure m;
  m.kind_ = Kind::Density;
  m.n_ = n;
  m.label_ = std::move(label);
  m.rho_ = std::move(rho);
  m.spec_ = spec;
  m.total_ = integrate_ball(m.rho_, nullptr, n, spec).value;
  if (!(m.total_ >= 0.0) || !std::isfinite(m.total_)) throw DomainError("density has invalid total mass");
  return m;
}

Measure Measure::point_masses(std::vector<std::pair<Point, double>> atoms, std::string label) {
  if (atoms.empty()) throw DomainError("point-mass measure needs at least one atom");
  Measure m;
  m.kind_ = Kind::PointMasses;
  m.n_ = static_cast<int>(atoms.front().first.size());
  m.label_ = std::move(label);
  for (const auto& [z, c] : atoms) {
    if (static_cast<int>(z.size()) != m.n_) throw DomainError("atoms of mixed dimension");
    if (!(norm(z) < 1.0)) throw DomainError("atom outside the open ball");
    if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("atom masses must be positive");
    m.total_ += c;
  }
  m.atoms_ = std::move(atoms);
  return m;
}

Measure Measure::zero(int n) {
  if (n < 1) throw DomainError("dimension must be >= 1");
  Measure m;
  m.kind_ = Kind::PointMasses;
  m.n_ = n;
  m.label_ = "zero";
  return m;
}

Measure Measure::scaled(double c) const {
  if (!(c >= 0.0) || !std::isfinite(c)) throw DomainError("measure scale must be nonnegative");
  Measure m = *this;
  m.factor_ *= c;
  m.total_ *= c;
  return m;
}

double Measure::density_at(const Point& z) const {
  switch (kind_) {
    case Kind::PointMasses: return 0.0;
    case Kind::Density: return factor_ * rho_(z);
    case Kind::Weighted: {
      const double r = norm(z);
      const double c = 1.0 - r;
      double v = weight_->eval_c(c);
      if (h_) v *= h_(c);
      if (g_ && r > 0.0) v *= g_(bergman::scaled(z, 1.0 / r));
      return factor_ * v;
    }
  }
  return 0.0;
}

Estimate Measure::block_mass(const Point& a, std::uint64_t seed) const {
  if (static_cast<int>(a.size()) != n_) throw DomainError("block center has the wrong dimension");
  const double ra = norm(a);
  if (!(ra < 1.0)) throw DomainError("block center must lie in the open ball");
  switch (kind_) {
    case Kind::PointMasses: {
      double s = 0.0;
      const Block B{a, 0.0};
      for (const auto& [z, c] : atoms_)
        if (contains(B, z)) s += c;
      return {factor_ * s, 0.0};
    }
    case Kind::Weighted: {
      const double rad = radial_block(*weight_, h_, ra);
      const double cap = block_cap(ra, n_);
      if (!g_) return {factor_ * rad * cap, 0.0};
      // angular factor: cap Monte Carlo
      const long m = spec_.sphere_samples;
      std::vector<double> v(m);
      Rng rng(seed);
      const Point e = ra > 0.0 ? bergman::scaled(a, 1.0 / ra) : unit_vector(n_, 0);
      for (long i = 0; i < m; ++i)
        v[i] = ra > 0.0 ? g_(sample_cap(e, std::sqrt(1.0 - ra), rng)) : g_(random_sphere(n_, rng));
      const Estimate ang = mean_stderr(v);
      return {factor_ * rad * cap * ang.value, factor_ * rad * cap * ang.error};
    }
    case Kind::Density: {
      QuadratureSpec s = spec_;
      s.seed = seed;
      const Estimate e = integrate_region(rho_, Block{a, 0.0}, nullptr, s);
      return {factor_ * e.value, factor_ * e.error};
    }
  }
  return {};
}

Estimate Measure::integrate_power(const HoloFun& F, double q, std::uint64_t seed) const {
  if (F.dim() != n_) throw DomainError("function and measure live in different dimensions");
  switch (kind_) {
    case Kind::PointMasses: {
      double s = 0.0;
      for (const auto& [z, c] : atoms_) s += c * std::pow(std::abs(F(z)), q);
      return {factor_ * s, 0.0};
    }
    case Kind::Weighted: {
      QuadratureSpec s = spec_;
      s.seed = seed;
      const auto centers = kernel_centers(F);
      if (centers.size() == 1 && norm(centers[0]) > 0.0) {
        s.sphere = SphereMode::Focused;
        s.focus_axis = normalized(centers[0]);
        s.focus_scale = 1.0 - norm(centers[0]);
        s.focus.zonal = !g_ && zonal_axis(F).has_value();
        // a probe: order 8 against 4 is ample at the 1e-6 level
        s.focus.order = 8;
        s.radial.order = 8;
        s.radial.rel_tol = std::max(s.radial.rel_tol, 1e-8);
      }
      auto G = [&](const Point& z) {
        const double r = norm(z);
        double v = std::pow(std::abs(F(z)), q);
        if (h_) v *= h_(1.0 - r);
        if (g_ && r > 0.0) v *= g_(bergman::scaled(z, 1.0 / r));
        return v;
      };
      const Estimate e = integrate_ball(G, weight_.get(), n_, s);
      return {factor_ * e.value, factor_ * e.error};
    }
    case Kind::Density: {
      auto G = [&](const Point& z) { return std::pow(std::abs(F(z)), q) * rho_(z); };
      const Estimate e = integrate_ball_mixture(G, nullptr, n_, mixture_for(F), spec_.region_samples, seed,
                                                spec_.boundary_bias);
      return {factor_ * e.value, factor_ * e.error};
    }
  }
  return {};
}

double block_mass_shared(const RadialWeight& w, const Point& a) {
  if (static_cast<int>(a.size()) != w.n()) throw DomainError("block center has the wrong dimension");
  const double ra = norm(a);
  if (!(ra < 1.0)) throw DomainError("block center must lie in the open ball");
  return radial_block(w, {}, ra) * block_cap(ra, w.n());
}

// ---- lattice -----------------------------------------------------------------

std::vector<Point> carleson_lattice(int n, const CarlesonLattice& lat) {
  if (n < 1) throw DomainError("dimension must be >= 1");
  if (lat.K < 1 || lat.K > 52) throw ConfigError("lattice depth K must lie in 1..52");
  if (lat.directions < 0) throw ConfigError("direction count must be nonnegative");
  std::vector<Point> dirs;
  if (n == 1) {
    const int D = lat.directions ? lat.directions : 16;
    // roots of unity in bit-reversed order so a prefix of a finer set is a
    // coarser set when D doubles
    std::vector<int> idx;
    for (int j = 0; j < D; ++j) idx.push_back(j);
    if ((D & (D - 1)) == 0) {
      int bits = 0;
      while ((1 << bits) < D) ++bits;
      for (int& j : idx) {
        int r = 0;
        for (int b = 0; b < bits; ++b)
          if (j & (1 << b)) r |= 1 << (bits - 1 - b);
        j = r;
      }
    }
    for (int j : idx) dirs.push_back({std::polar(1.0, 2.0 * std::numbers::pi * j / D)});
  } else {
    for (int j = 0; j < n; ++j) dirs.push_back(unit_vector(n, j));
    const int D = lat.directions ? lat.directions : 64;
    Rng rng(derive_seed(lat.seed, 0x1a77));
    for (int i = 0; i < D; ++i) dirs.push_back(random_sphere(n, rng));
  }
  std::vector<Point> pts{Point(n, cplx(0.0))};
  for (int k = 1; k <= lat.K; ++k) {
    const double r = 1.0 - std::ldexp(1.0, -k);
    for (const auto& d : dirs) pts.push_back(scaled(d, r));
  }
  return pts;
}

double lattice_radius(const Point& a) {
  const double r = norm(a);
  if (r == 0.0 || !(r < 1.0)) return r;
  const double k = std::round(-std::log2(1.0 - r));
  const double snap = 1.0 - std::exp2(-k);
  return std::abs(snap - r) <= 1e-14 ? snap : r;
}

// ---- quotients ---------------------------------------------------------------

CarlesonReport carleson_quotient(const Measure& mu, const RadialWeight& w, double p, double q,
                                 const CarlesonLattice& lat) {
  check_exponents(p, q);
  check_dims(mu, w);
  const auto pts = carleson_lattice(w.n(), lat);
  CarlesonReport rep;
  rep.samples.resize(pts.size());
  const double e = q / p;
  parallel_for(pts.size(), [&](std::size_t i) {
    QuotientSample& s = rep.samples[i];
    s.a = pts[i];
    s.radius = lattice_radius(pts[i]);
    s.omega = block_mass_shared(w, pts[i]);
    try {
      const Estimate m = mu.block_mass(pts[i], point_seed(lat.seed, pts[i]));
      s.mu = m.value;
      s.mu_error = m.error;
      s.quotient = s.mu / std::pow(s.omega, e);
    } catch (const DegenerateRegion&) {
      s.degenerate = true;
      s.quotient = std::nan("");
    }
  });
  std::vector<double> lr, lq;
  std::map<double, double> prof;
  for (const auto& s : rep.samples) {
    if (s.degenerate) {
      ++rep.degenerate_count;
      continue;
    }
    rep.sup_estimate = std::max(rep.sup_estimate, s.quotient);
    auto [it, fresh] = prof.emplace(s.radius, s.quotient);
    if (!fresh) it->second = std::max(it->second, s.quotient);
  }
  rep.radial_profile.assign(prof.begin(), prof.end());
  for (const auto& [r, v] : rep.radial_profile) {
    if (r == 0.0 || !(v > 0.0)) continue;
    const double k = -std::log2(1.0 - r);
    if (k < 0.5 * lat.K) continue;
    lr.push_back(-std::log1p(-r));
    lq.push_back(std::log(v));
  }
  if (lr.size() >= 2) rep.profile_slope = ls_slope(lr, lq);
  rep.inputs_hash = report_hash(mu, w, p, q, lat);
  return rep;
}

std::vector<std::pair<Point, double>> embedding_panel(const Measure& mu, const RadialWeight& w, double p, double q,
                                                      const CarlesonLattice& lat) {
  check_exponents(p, q);
  check_dims(mu, w);
  auto pts = carleson_lattice(w.n(), lat);
  pts.erase(pts.begin());
  std::vector<std::pair<Point, double>> out(pts.size());
  if (mu.total() == 0.0) {
    for (std::size_t i = 0; i < pts.size(); ++i) out[i] = {pts[i], 0.0};
    return out;
  }
  const double gamma = test_function_gamma(w);
  parallel_for(pts.size(), [&](std::size_t i) {
    const auto tf = test_function(pts[i], p, gamma);
    const double num = mu.integrate_power(tf.f, q, point_seed(lat.seed ^ 0xe3b, pts[i])).value;
    out[i] = {pts[i], num / std::pow(block_mass_shared(w, pts[i]), q / p)};
  });
  return out;
}

double embedding_lower_bound(const Measure& mu, const RadialWeight& w, double p, double q,
                             const CarlesonLattice& lat) {
  double m = 0.0;
  for (const auto& [a, v] : embedding_panel(mu, w, p, q, lat)) m = std::max(m, v);
  return m;
}

// ---- maximal-function probe --------------------------------------------------

namespace {

// nodes and weights of mu; the probe self-normalizes them
void probe_nodes(const Measure& mu, const ProbeSpec& spec, const std::optional<Point>& focus,
                 std::vector<Point>& nodes, std::vector<double>& wts) {
  const int n = mu.n();
  if (mu.kind() == Measure::Kind::PointMasses) {
    for (const auto& [z, c] : mu.atoms()) {
      nodes.push_back(z);
      wts.push_back(c);
    }
    return;
  }
  int depth = spec.radial_depth;
  SphereRule sph;
  if (focus && norm(*focus) > 0.0) {
    if (static_cast<int>(focus->size()) != n) throw DomainError("probe focus has the wrong dimension");
    const double s = 1.0 - norm(*focus);
    FocusOptions o;
    o.order = spec.focus_order;
    o.seed = derive_seed(spec.seed, 0xf0c);
    sph = sphere_focused(normalized(*focus), s, o);
    depth = std::max(depth, static_cast<int>(std::ceil(-std::log2(s))) + 3);
  } else {
    sph = sphere_mc(n, spec.directions, derive_seed(spec.seed, 0x5e7));
  }
  const auto rule = two_sided_rule(depth, spec.radial_order);
  for (const auto& u : rule) {
    const double rad = 2.0 * n * std::pow(u.t, 2 * n - 1) * u.w;
    for (std::size_t d = 0; d < sph.nodes.size(); ++d) {
      Point z = scaled(sph.nodes[d], u.t);
      double dens;
      if (mu.kind() == Measure::Kind::Weighted) {
        dens = mu.factor() * mu.weight()->eval_c(u.c);
        if (mu.radial_factor()) dens *= mu.radial_factor()(u.c);
        if (mu.angular_factor()) dens *= mu.angular_factor()(sph.nodes[d]);
      } else {
        dens = mu.density_at(z);
      }
      const double wt = rad * sph.weights[d] * dens;
      if (wt > 0.0) {
        nodes.push_back(std::move(z));
        wts.push_back(wt);
      }
    }
  }
}

}  // namespace

ProbeReport maximal_embedding_probe(const std::vector<Probe>& probes, const Measure& mu, const RadialWeight& w,
                                    double p, double q, double alpha, const ProbeSpec& spec,
                                    const CarlesonLattice& lat) {
  check_exponents(p, q);
  check_dims(mu, w);
  if (!(p * alpha > 1.0)) throw DomainError("the probe needs p * alpha > 1");
  if (spec.directions < 1 || spec.radial_depth < 1) throw ConfigError("probe rule must be nonempty");
  const int n = w.n();

  ProbeReport rep;
  rep.carleson_sup = carleson_quotient(mu, w, p, q, lat).sup_estimate;
  for (std::size_t k = 0; k < probes.size(); ++k) {
    const auto& pr = probes[k];
    std::vector<Point> nodes;
    std::vector<double> wts;
    probe_nodes(mu, spec, pr.focus, nodes, wts);
    double wsum = 0.0;
    for (double v : wts) wsum += v;
    ProbeRow row;
    row.label = pr.label;
    BallIntegrand root = [&](const Point& z) { return std::pow(std::abs(pr.phi(z)), 1.0 / alpha); };
    std::vector<double> vals(nodes.size());
    parallel_for(nodes.size(), [&](std::size_t i) {
      const double M = maximal_function(root, w, nodes[i], spec.candidates, derive_seed(spec.seed, 7919 * k + 3),
                                        spec.samples_per_block);
      vals[i] = std::pow(M, alpha * q);
    });
    double s = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) s += wts[i] * vals[i];
    const double integral = wsum > 0.0 ? mu.total() * s / wsum : 0.0;
    row.maximal_norm = std::pow(integral, 1.0 / q);
    QuadratureSpec qs = spec.omega_quad;
    const double lp = integrate_ball([&](const Point& z) { return std::pow(std::abs(pr.phi(z)), p); }, &w, n, qs).value;
    row.probe_norm = std::pow(lp, 1.0 / p);
    row.ratio = row.probe_norm > 0.0 ? row.maximal_norm / row.probe_norm : 0.0;
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

}  // namespace bergman
