#include "bergman/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>

namespace bergman {

double sphere_monomial_pairing(const MultiIndex& b1, const MultiIndex& b2) {
  if (b1.size() != b2.size()) throw DomainError("multi-index length mismatch");
  if (b1 != b2) return 0.0;
  const int n = static_cast<int>(b1.size());
  // (n-1)! beta! / (n-1+|beta|)!
  double lg = std::lgamma(double(n));
  for (int e : b1) lg += std::lgamma(e + 1.0);
  lg -= std::lgamma(double(n + degree(b1)));
  return std::exp(lg);
}

SphereRule sphere_mc(int n, long samples, std::uint64_t seed) {
  if (samples < 1) throw ConfigError("sphere sample count must be positive");
  SphereRule rule;
  rule.monte_carlo = true;
  Rng rng(seed);
  rule.nodes.reserve(samples);
  for (long i = 0; i < samples; ++i) rule.nodes.push_back(random_sphere(n, rng));
  rule.weights.assign(samples, 1.0 / samples);
  return rule;
}

SphereRule sphere_exact(int n, int d) {
  if (n < 1) throw DomainError("dimension must be >= 1");
  if (d < 0) throw ConfigError("exact sphere degree must be nonnegative");
  const int M = d + 1;
  std::vector<cplx> phases;
  for (int j = 0; j < M; ++j) phases.push_back(std::polar(1.0, 2.0 * std::numbers::pi * j / M));
  SphereRule rule;
  // |zeta_1|^2 = t has density (k-1)(1-t)^{k-2} on S^{2k-1}; degree in t is at most d + k - 2
  const int orders[] = {4, 6, 8, 12, 16, 20, 24, 32, 48, 64};
  auto order_for = [&](int k) {
    const int need = (d + k) / 2 + 1;
    for (int o : orders)
      if (o >= need) return o;
    throw ConfigError("exact sphere degree too large");
  };
  // a point of S^{2k-1} is (sqrt(t) e^{i phi}, sqrt(1-t) rest) with rest on S^{2k-3}
  std::vector<std::pair<Point, double>> level;
  for (const cplx& ph : phases) level.push_back({Point{ph}, 1.0 / M});
  for (int k = 2; k <= n; ++k) {
    const GaussRule& g = gauss_legendre(order_for(k));
    std::vector<std::pair<Point, double>> next;
    for (std::size_t i = 0; i < g.x.size(); ++i) {
      const double t = 0.5 * (1.0 + g.x[i]);
      const double wt = 0.5 * g.w[i] * (k - 1) * std::pow(1.0 - t, k - 2);
      for (const cplx& ph : phases)
        for (const auto& [rest, wr] : level) {
          Point z(k);
          z[0] = std::sqrt(t) * ph;
          for (int j = 1; j < k; ++j) z[j] = std::sqrt(1.0 - t) * rest[j - 1];
          next.push_back({std::move(z), wt * wr / M});
        }
    }
    level = std::move(next);
  }
  for (auto& [z, w] : level) {
    rule.nodes.push_back(std::move(z));
    rule.weights.push_back(w);
  }
  return rule;
}

SphereRule sphere_focused(const Point& axis, double scale, const FocusOptions& opt) {
  const int n = static_cast<int>(axis.size());
  if (n < 1 || std::abs(norm(axis) - 1.0) > 1e-9) throw DomainError("focus axis must be a unit vector");
  if (!(scale > 0.0)) throw DomainError("focus scale must be positive");
  const GaussRule& g = gauss_legendre(opt.order);
  const double floor = std::min(scale, 1.0) * std::ldexp(1.0, -opt.depth_below);
  SphereRule rule;

  // [0, floor] then panels growing by 4x up to top
  auto panels = [&](double top) {
    std::vector<std::pair<double, double>> ps;
    if (top <= floor) {
      ps.push_back({0.0, top});
      return ps;
    }
    ps.push_back({0.0, floor});
    double lo = floor;
    while (lo < top) {
      double hi = std::min(4.0 * lo, top);
      if (top - hi < hi - lo) hi = top;
      ps.push_back({lo, hi});
      lo = hi;
    }
    return ps;
  };

  if (n == 1) {
    for (auto [lo, hi] : panels(std::numbers::pi)) {
      const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
      for (std::size_t i = 0; i < g.x.size(); ++i) {
        const double phi = c + h * g.x[i];
        const double wt = g.w[i] * h / (2.0 * std::numbers::pi);
        for (double sgn : {-1.0, 1.0}) {
          rule.nodes.push_back({axis[0] * std::polar(1.0, sgn * phi)});
          rule.weights.push_back(wt);
        }
      }
    }
    return rule;
  }

  // transverse directions in C^{n-1}
  const int m = opt.zonal ? 1 : std::max(1, opt.eta_samples);
  std::vector<std::vector<cplx>> etas;
  if (n == 2) {
    for (int j = 0; j < m; ++j) etas.push_back({std::polar(1.0, 2.0 * std::numbers::pi * j / m)});
  } else {
    Rng rng(opt.seed);
    for (int j = 0; j < m; ++j) {
      Point y = random_sphere(n - 1, rng);
      etas.emplace_back(y.begin(), y.end());
    }
  }
  const auto frame = unitary_frame(axis);
  // theta = sgn (pi/2 - psi), so cos theta = sin psi
  for (auto [plo, phi_] : panels(std::numbers::pi / 2)) {
    const double pc = 0.5 * (plo + phi_), ph = 0.5 * (phi_ - plo);
    for (std::size_t i = 0; i < g.x.size(); ++i) {
      const double psi = pc + ph * g.x[i];
      const double wth = g.w[i] * ph;
      const double c2 = 2.0 * std::sin(psi);
      for (auto [lo, hi] : panels(c2)) {
        const double rc = 0.5 * (lo + hi), rh = 0.5 * (hi - lo);
        for (std::size_t k = 0; k < g.x.size(); ++k) {
          const double rho = rc + rh * g.x[k];
          const double q = rho * (c2 - rho);  // 1 - |w|^2
          const double wt =
              (n - 1) / std::numbers::pi * rho * std::pow(q, n - 2) * g.w[k] * rh * wth / m;
          const double tail = std::sqrt(std::max(q, 0.0));
          for (double sgn : {-1.0, 1.0}) {
            const cplx w = 1.0 - std::polar(rho, sgn * (std::numbers::pi / 2 - psi));
            for (const auto& eta : etas) {
              Point y(n);
              y[0] = w;
              for (int j = 1; j < n; ++j) y[j] = tail * eta[j - 1];
              rule.nodes.push_back(apply_frame(frame, y));
              rule.weights.push_back(wt);
            }
          }
        }
      }
    }
  }
  return rule;
}

namespace {

const RadialWeight& unit_weight(int n) {
  static std::mutex mu;
  static std::map<int, RadialWeight> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, RadialWeight::power(0.0, false, n)).first;
  return it->second;
}

std::vector<double> per_direction(const BallIntegrand& F, const RadialWeight& w, const SphereRule& rule,
                                  const RadialSpec& radial) {
  const int n = static_cast<int>(rule.nodes.front().size());
  const int p = 2 * n - 1;
  std::vector<double> vals(rule.nodes.size());
  parallel_for(rule.nodes.size(), [&](std::size_t k) {
    const Point& xi = rule.nodes[k];
    vals[k] = 2.0 * n * w.integrate_tc([&](double t, double) { return std::pow(t, p) * F(scaled(xi, t)); }, 1.0,
                                       radial);
  });
  return vals;
}

SphereRule rule_for(int n, const QuadratureSpec& spec, int order) {
  if (spec.sphere == SphereMode::MonteCarlo) return sphere_mc(n, spec.sphere_samples, spec.seed);
  if (spec.sphere == SphereMode::Exact) return sphere_exact(n, spec.exact_degree);
  if (static_cast<int>(spec.focus_axis.size()) != n) throw ConfigError("focused rule needs an axis in C^n");
  FocusOptions o = spec.focus;
  o.order = order;
  return sphere_focused(spec.focus_axis, spec.focus_scale, o);
}

int coarse_order(int order) { return order > 8 ? 8 : 4; }

}  // namespace

double integrate_ball_rule(const BallIntegrand& F, const RadialWeight* w, const SphereRule& rule,
                           const RadialSpec& radial) {
  if (rule.nodes.empty()) throw ConfigError("empty sphere rule");
  const int n = static_cast<int>(rule.nodes.front().size());
  const RadialWeight& ww = w ? *w : unit_weight(n);
  const auto vals = per_direction(F, ww, rule, radial);
  double s = 0.0;
  for (std::size_t k = 0; k < vals.size(); ++k) s += rule.weights[k] * vals[k];
  return s;
}

Estimate integrate_ball(const BallIntegrand& F, const RadialWeight* w, int n, const QuadratureSpec& spec) {
  if (w && w->n() != n) throw DomainError("weight dimension differs from integrand dimension");
  const RadialWeight& ww = w ? *w : unit_weight(n);
  if (spec.sphere == SphereMode::MonteCarlo) {
    const SphereRule rule = sphere_mc(n, spec.sphere_samples, spec.seed);
    const auto vals = per_direction(F, ww, rule, spec.radial);
    return mean_stderr(vals);
  }
  if (spec.sphere == SphereMode::Exact) {
    const double v = integrate_ball_rule(F, &ww, rule_for(n, spec, 0), spec.radial);
    return {v, std::abs(v) * spec.radial.rel_tol};
  }
  const double hi = integrate_ball_rule(F, &ww, rule_for(n, spec, spec.focus.order), spec.radial);
  const double lo = integrate_ball_rule(F, &ww, rule_for(n, spec, coarse_order(spec.focus.order)), spec.radial);
  return {hi, std::abs(hi - lo)};
}

Estimate sphere_mean(const std::function<double(const Point&)>& F, double r, int n, const QuadratureSpec& spec) {
  if (!(r >= 0.0 && r < 1.0)) throw DomainError("sphere radius must lie in [0,1)");
  auto run = [&](const SphereRule& rule, double* var) {
    std::vector<double> vals(rule.nodes.size());
    parallel_for(vals.size(), [&](std::size_t k) { vals[k] = F(scaled(rule.nodes[k], r)); });
    if (var) {
      const Estimate e = mean_stderr(vals);
      *var = e.error * e.error;
      return e.value;
    }
    double s = 0.0;
    for (std::size_t k = 0; k < vals.size(); ++k) s += rule.weights[k] * vals[k];
    return s;
  };
  if (spec.sphere == SphereMode::MonteCarlo) {
    double var = 0.0;
    const double v = run(sphere_mc(n, spec.sphere_samples, spec.seed), &var);
    return {v, std::sqrt(var)};
  }
  if (spec.sphere == SphereMode::Exact) return {run(rule_for(n, spec, 0), nullptr), 0.0};
  const double hi = run(rule_for(n, spec, spec.focus.order), nullptr);
  const double lo = run(rule_for(n, spec, coarse_order(spec.focus.order)), nullptr);
  return {hi, std::abs(hi - lo)};
}

// ---- region Monte Carlo -------------------------------------------------------

namespace {

constexpr double kDeep = 0x1p-60;  // below this 1 - u is indistinguishable from 1

// cap radius^2 rounded up to a dyadic level so cap measures can be cached
double dyadic_ceiling(double rr) {
  if (rr >= 2.0) return 2.0;
  int e = 0;
  std::frexp(rr, &e);
  return std::min(2.0, std::ldexp(1.0, e));
}

double cached_cap(double rr, int n) {
  static std::mutex mu;
  static std::map<std::pair<int, double>, double> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(n, rr);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  const double v = cap_measure(cap_radius_from_sq(rr), n);
  cache.emplace(key, v);
  return v;
}

}  // namespace

RegionSampler::RegionSampler(const Region& R, double boundary_bias, const RadialWeight* w)
    : region_(R), w_(w), bias_(boundary_bias) {
  if (!(boundary_bias >= 0.0 && boundary_bias < 1.0)) throw ConfigError("boundary_bias must lie in [0,1)");
  validate(R);
  n_ = region_dim(R);
  if (w && w->n() != n_) throw DomainError("weight dimension differs from region dimension");
  if (std::holds_alternative<Cap>(R)) throw DomainError("cap regions have no volume; use cap_measure");
  if (const auto* b = std::get_if<Block>(&R)) {
    const double ra = norm(b->a);
    lo_ = ra;
    if (ra > 0.0) axis_ = scaled(b->a, 1.0 / ra);
  } else if (const auto* t = std::get_if<Tube>(&R)) {
    lo_ = std::max(0.0, 1.0 - t->r);
    axis_ = t->xi;
  } else if (const auto* a = std::get_if<Admissible>(&R)) {
    const double s = norm(a->zeta);
    if (s == 0.0) throw DegenerateRegion("admissible region at the origin is a single point");
    hi_ = s;
    axis_ = scaled(a->zeta, 1.0 / s);
  } else if (const auto* te = std::get_if<Tent>(&R)) {
    const double rz = norm(te->z);
    lo_ = rz;
    if (rz > 0.0) axis_ = scaled(te->z, 1.0 / rz);
  }
  umax_ = 1.0 - lo_;
  umin_ = std::max(1.0 - hi_, kDeep);
  if (umin_ >= umax_) umin_ = 1.0 - hi_;
  if (!w_) return;

  // omega-mass of dyadic cells on the main range
  const GaussRule& g = gauss_legendre(8);
  double total = 0.0;
  cell_edge_.push_back(umax_);
  cell_cdf_.push_back(0.0);
  for (double top = umax_; top > umin_;) {
    const double bot = std::max(0.5 * top, umin_);
    const double c = 0.5 * (top + bot), h = 0.5 * (top - bot);
    double m = 0.0;
    for (std::size_t i = 0; i < g.x.size(); ++i) m += g.w[i] * h * w_->eval_c(c + h * g.x[i]);
    total += m;
    cell_edge_.push_back(bot);
    cell_cdf_.push_back(total);
    top = bot;
  }
  if (1.0 - hi_ < kDeep && umin_ == kDeep) deep_mass_ = w_->hat_c(kDeep);
  if (total > 0.0) {
    has_table_ = true;
    for (double& v : cell_cdf_) v /= total;
  }
  const double all = total + deep_mass_;
  if (all > 0.0) p_deep_ = deep_mass_ / all;
}

double RegionSampler::cap_sq(double r) const {
  double rr = 2.0;
  if (!axis_.empty()) {
    if (const auto* bl = std::get_if<Block>(&region_)) rr = (bl->alpha + 1.0) * (1.0 - lo_);
    else if (const auto* te = std::get_if<Tent>(&region_)) rr = (te->aperture + 1.0) * (1.0 - lo_);
    else if (const auto* tu = std::get_if<Tube>(&region_)) rr = 2.0 * tu->r;
    else if (const auto* ad = std::get_if<Admissible>(&region_))
      rr = r > 0.0 ? dyadic_ceiling((ad->aperture + 1.0) * (hi_ / r - 1.0)) : 2.0;
  }
  return std::min(rr, 2.0);
}

double RegionSampler::main_pdf(double u) const {
  const double b = bias_;
  const double A = std::pow(umin_, 1.0 - b), B = std::pow(umax_, 1.0 - b);
  double q = (1.0 - b) * std::pow(u, -b) / (B - A);
  if (has_table_) {
    std::size_t j = std::lower_bound(cell_edge_.begin(), cell_edge_.end(), u, std::greater<double>()) -
                    cell_edge_.begin();
    j = std::clamp<std::size_t>(j, 1, cell_edge_.size() - 1);
    const double qt = (cell_cdf_[j] - cell_cdf_[j - 1]) / (cell_edge_[j - 1] - cell_edge_[j]);
    q = 0.5 * q + 0.5 * qt;
  }
  return q;
}

RegionSample RegionSampler::draw(Rng& rng) const {
  constexpr double kTop = 1.0 - 0x1p-53;
  const double b = bias_;
  double u = 0.0;
  if (p_deep_ > 0.0 && rng.uniform() < p_deep_) {
    u = 0.5 * kDeep;
  } else {
    const bool use_table = has_table_ && rng.uniform() < 0.5;
    if (use_table) {
      const double v = rng.uniform();
      std::size_t j = std::upper_bound(cell_cdf_.begin(), cell_cdf_.end(), v) - cell_cdf_.begin();
      j = std::clamp<std::size_t>(j, 1, cell_cdf_.size() - 1);
      u = cell_edge_[j] + rng.uniform() * (cell_edge_[j - 1] - cell_edge_[j]);
    } else {
      const double A = std::pow(umin_, 1.0 - b), B = std::pow(umax_, 1.0 - b);
      u = std::pow(A + rng.uniform() * (B - A), 1.0 / (1.0 - b));
    }
    u = std::clamp(u, umin_, umax_);
  }
  const bool deep = u < kDeep;
  const double r = 1.0 - u;
  const double rr = cap_sq(r);
  Point dir = (axis_.empty() || rr >= 2.0) ? random_sphere(n_, rng) : sample_cap(axis_, std::sqrt(rr), rng);
  const double sig = rr >= 2.0 ? 1.0 : cached_cap(rr, n_);
  Point z = scaled(dir, std::min(r, kTop));
  const bool in = contains(region_, z);
  const double radial_prob = deep ? p_deep_ : (1.0 - p_deep_) * main_pdf(u);
  return {std::move(z), u, target(u) * sig / radial_prob, in};
}

double RegionSampler::target(double c) const {
  if (c < kDeep) return 2.0 * n_ * deep_mass_;
  return 2.0 * n_ * std::pow(1.0 - c, 2 * n_ - 1) * (w_ ? w_->eval_c(c) : 1.0);
}

double RegionSampler::pdf(const Point& z, double c) const {
  double rad = 0.0;
  if (c < kDeep) {
    rad = p_deep_;
  } else {
    if (c < umin_ || c > umax_) return 0.0;
    rad = (1.0 - p_deep_) * main_pdf(c);
  }
  if (rad == 0.0) return 0.0;
  const double rr = cap_sq(1.0 - c);
  if (axis_.empty() || rr >= 2.0) return rad;
  const double rz = norm(z);
  if (rz == 0.0) return 0.0;
  if (std::abs(1.0 - inner(z, axis_) / rz) >= rr) return 0.0;
  return rad / cached_cap(rr, n_);
}

Estimate integrate_region(const BallIntegrand& F, const Region& R, const RadialWeight* w,
                          const QuadratureSpec& spec) {
  if (spec.region_samples < 1) throw ConfigError("region sample count must be positive");
  const RegionSampler sampler(R, spec.boundary_bias, w);
  constexpr long kShard = 2048;
  const long N = spec.region_samples;
  const std::size_t shards = static_cast<std::size_t>((N + kShard - 1) / kShard);
  std::vector<double> s1(shards), s2(shards);
  std::vector<long> hits(shards);
  parallel_for(shards, [&](std::size_t k) {
    Rng rng(derive_seed(spec.seed, k));
    const long m = std::min<long>(kShard, N - static_cast<long>(k) * kShard);
    double a = 0.0, a2 = 0.0;
    long h = 0;
    for (long i = 0; i < m; ++i) {
      const RegionSample smp = sampler.draw(rng);
      if (!smp.inside) continue;
      ++h;
      const double x = smp.weight * F(smp.z);
      a += x;
      a2 += x * x;
    }
    s1[k] = a;
    s2[k] = a2;
    hits[k] = h;
  });
  double a = 0.0, a2 = 0.0;
  long h = 0;
  for (std::size_t k = 0; k < shards; ++k) {
    a += s1[k];
    a2 += s2[k];
    h += hits[k];
  }
  if (h == 0) throw DegenerateRegion("no samples landed in the region");
  const double mean = a / N;
  const double var = std::max(0.0, (a2 / N - mean * mean)) / std::max<long>(N - 1, 1);
  return {mean, std::sqrt(var)};
}

Estimate integrate_ball_mixture(const BallIntegrand& F, const RadialWeight* w, int n,
                                const std::vector<Region>& proposals, long samples, std::uint64_t seed,
                                double boundary_bias) {
  if (proposals.empty()) throw ConfigError("mixture needs at least one proposal");
  if (samples < 1) throw ConfigError("mixture sample count must be positive");
  std::vector<RegionSampler> comps;
  for (const Region& R : proposals) {
    if (region_dim(R) != n) throw DomainError("proposal dimension differs from integrand dimension");
    comps.emplace_back(R, boundary_bias, w);
  }
  const double K = static_cast<double>(comps.size());
  constexpr long kShard = 1024;
  const std::size_t shards = static_cast<std::size_t>((samples + kShard - 1) / kShard);
  std::vector<double> vals(static_cast<std::size_t>(samples));
  parallel_for(shards, [&](std::size_t k) {
    Rng rng(derive_seed(seed, k));
    const long lo = static_cast<long>(k) * kShard, hi = std::min(samples, lo + kShard);
    for (long i = lo; i < hi; ++i) {
      const std::size_t j = std::min(comps.size() - 1, static_cast<std::size_t>(rng.uniform() * K));
      const RegionSample smp = comps[j].draw(rng);
      double q = 0.0;
      for (const auto& c : comps) q += c.pdf(smp.z, smp.c);
      q /= K;
      vals[static_cast<std::size_t>(i)] = q > 0.0 ? comps[j].target(smp.c) / q * F(smp.z) : 0.0;
    }
  });
  return mean_stderr(vals);
}

std::vector<Region> mixture_for(const HoloFun& f) {
  const int n = f.dim();
  std::vector<Region> out{Block{Point(n, 0.0), 0.0}};
  for (const Point& a : kernel_centers(f)) {
    const double ra = norm(a);
    if (ra == 0.0) continue;
    const Point e = scaled(a, 1.0 / ra);
    for (double c = 1.0 - ra; c < 0.5; c *= 4.0) out.push_back(Block{scaled(e, 1.0 - c), 1.0});
  }
  return out;
}

}  // namespace bergman
