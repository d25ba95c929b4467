#include "bergman/volterra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

// boost 1.74 splines call isnan unqualified
using std::isnan;

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/math/tools/minima.hpp>

#include "bergman/geometry.hpp"
#include "bergman/quadrature.hpp"

namespace bergman {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_dim(const HoloFun& g, const RadialWeight& w) {
  if (g.dim() != w.n()) throw DomainError("symbol and weight live in different dimensions");
}

std::string point_key(const Point& a) {
  std::ostringstream os;
  os << std::hexfloat;
  for (const auto& c : a) os << c.real() << ',' << c.imag() << ';';
  return os.str();
}

// least-squares slope of log(v) against log(1/(1-r)) for k >= K/2; zeros skipped
double tail_slope_of(const std::vector<std::pair<double, double>>& prof, int K) {
  std::vector<double> x, y;
  for (const auto& [r, v] : prof) {
    if (r == 0.0 || !(v > 0.0) || !std::isfinite(v)) continue;
    if (-std::log2(1.0 - r) < 0.5 * K) continue;
    x.push_back(-std::log1p(-r));
    y.push_back(std::log(v));
  }
  return x.size() >= 2 ? ls_slope(x, y) : 0.0;
}

bool tail_nonincreasing(const std::vector<std::pair<double, double>>& prof, int K) {
  double prev = kInf;
  for (const auto& [r, v] : prof) {
    if (r == 0.0 || -std::log2(1.0 - r) < 0.5 * K) continue;
    if (v > prev * (1.0 + 1e-12)) return false;
    prev = v;
  }
  return true;
}

// omega^* on a cubic B-spline in log2(1-r), for r >= 1/2; direct below
class StarTable {
 public:
  explicit StarTable(const RadialWeight& w) : w_(w) {
    std::vector<double> v;
    bool positive = true;
    for (int i = 0; i <= kCount; ++i) {
      const double s = w.star_c(std::exp2(kLo + i * kStep));
      positive = positive && s > 0.0;
      v.push_back(s > 0.0 ? std::log(s) : 0.0);
    }
    if (positive) spline_.emplace(v.begin(), v.end(), kLo, kStep);
  }
  double operator()(double c) const {
    if (c <= 0.0) return 0.0;
    const double u = std::log2(c);
    if (spline_ && u >= kLo && u <= kHi) return std::exp((*spline_)(u));
    return w_.star_c(c);
  }

 private:
  static constexpr double kLo = -60.0, kHi = -1.0, kStep = 1.0 / 16.0;
  static constexpr int kCount = 944;  // (kHi - kLo) / kStep
  RadialWeight w_;
  std::optional<boost::math::interpolators::cardinal_cubic_b_spline<double>> spline_;
};

const StarTable& star_table(const RadialWeight& w) {
  static std::mutex mu;
  static std::map<std::string, std::unique_ptr<StarTable>> cache;
  const std::string key = fingerprint(w);
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, std::make_unique<StarTable>(w)).first;
  return *it->second;
}

cplx ray_integral(const HoloFun& f, const HoloFun& Rg, const Point& z, const RadialSpec& ray) {
  if (norm2(z) == 0.0) return 0.0;
  auto integrand = [&](double s) {
    const double t = 1.0 - s;
    const Point zt = scaled(z, t);
    return f(zt) * Rg(zt) / t;
  };
  const cplx end = f(z) * Rg(z);
  return geometric_integral(integrand, 1.0, [&](double lo) { return end * lo; }, ray);
}

// homogeneous parts of a polynomial without constant term: P_j = sum_{|b|=j} d_b z^b
std::map<int, PolyMap> homogeneous_parts(const HoloFun& h) {
  std::map<int, PolyMap> parts;
  for (const auto& [b, c] : poly_terms(h)) parts[degree(b)][b] = c;
  return parts;
}

cplx monomial_at(const MultiIndex& b, const Point& z) {
  cplx v = 1.0;
  for (std::size_t j = 0; j < b.size(); ++j)
    for (int e = 0; e < b[j]; ++e) v *= z[j];
  return v;
}

// int_{S_a} |Rg|^2 omega^* dV for polynomial Rg:
// sum_{j,j'} R_{j+j'}(|a|) int_{Q_a} P_j conj(P_j') dsigma, R_m = 2n int_{|a|}^1 r^{2n-1+m} omega^*
Estimate poly_block_numerator(const std::map<int, PolyMap>& parts, const RadialWeight& w, const Point& a,
                              long cap_samples, std::uint64_t seed) {
  const int n = w.n();
  const double ra = norm(a);
  std::map<int, double> R;
  for (const auto& [j, pj] : parts)
    for (const auto& [k, pk] : parts)
      if (!R.count(j + k)) R[j + k] = 2.0 * n * w.log_moment(2 * n - 1 + j + k, 1, ra);

  if (ra == 0.0) {
    double s = 0.0;
    for (const auto& [j, pj] : parts)
      for (const auto& [b1, c1] : pj)
        for (const auto& [b2, c2] : pj) s += std::real(c1 * std::conj(c2)) * sphere_monomial_pairing(b1, b2) * R[2 * j];
    return {s, 0.0};
  }
  if (n == 1) {
    // arc |theta - theta_a| <= phi with phi = 2 asin((1-|a|)/2)
    const double phi = 2.0 * std::asin(0.5 * (1.0 - ra));
    const double th = std::arg(a[0]);
    double s = 0.0;
    for (const auto& [j, pj] : parts)
      for (const auto& [k, pk] : parts) {
        const cplx cj = pj.begin()->second, ck = pk.begin()->second;
        const int d = j - k;
        const cplx arc = d == 0 ? cplx(phi / std::numbers::pi)
                                : std::polar(std::sin(d * phi) / (std::numbers::pi * d), d * th);
        s += std::real(cj * std::conj(ck) * arc) * R[j + k];
      }
    return {s, 0.0};
  }
  const Point e = scaled(a, 1.0 / ra);
  const double rad = std::sqrt(1.0 - ra);
  const double sigma = cap_measure(rad, n);
  Rng rng(seed);
  std::vector<double> v(cap_samples);
  std::vector<std::pair<int, cplx>> P;
  for (long i = 0; i < cap_samples; ++i) {
    const Point eta = sample_cap(e, rad, rng);
    P.clear();
    for (const auto& [j, pj] : parts) {
      cplx s = 0.0;
      for (const auto& [b, c] : pj) s += c * monomial_at(b, eta);
      P.push_back({j, s});
    }
    double s = 0.0;
    for (const auto& [j, x] : P)
      for (const auto& [k, y] : P) s += std::real(x * std::conj(y)) * R[j + k];
    v[i] = sigma * s;
  }
  return mean_stderr(v);
}

std::vector<Point> kappa_lattice(const HoloFun& g, const CarlesonLattice& lat) {
  auto pts = carleson_lattice(g.dim(), lat);
  for (const auto& c : kernel_centers(g)) {
    if (norm(c) == 0.0) continue;
    const Point e = normalized(c);
    for (int k = 1; k <= lat.K; ++k) pts.push_back(scaled(e, 1.0 - std::ldexp(1.0, -k)));
  }
  return pts;
}

std::uint64_t symbol_hash(const std::string& tag, const HoloFun& g, const RadialWeight& w, double p, double q,
                          const VolterraSpec& s) {
  std::ostringstream os;
  os << std::hexfloat << tag << '|' << fingerprint(g) << '|' << fingerprint(w) << '|' << p << '|' << q << '|'
     << s.lattice.K << '|' << s.lattice.directions << '|' << s.lattice.seed << '|' << s.cap_samples << '|'
     << s.region_samples << '|' << s.directions << '|' << s.ascent_steps << '|' << s.trend_tol << '|' << s.operator_K
     << '|' << s.operator_samples << '|' << s.bmoa_K << '|' << s.bmoa_directions << '|' << s.bmoa_samples;
  return fnv1a64(os.str());
}

}  // namespace

// ---- T_g ---------------------------------------------------------------------

HoloFun tg_symbolic(const HoloFun& g, const HoloFun& f) {
  if (g.dim() != f.dim()) throw DomainError("symbol and function live in different dimensions");
  if (!is_polynomial(g) || !is_polynomial(f)) throw DomainError("symbolic T_g needs polynomials");
  PolyMap out;
  for (const auto& [gb, gc] : poly_terms(g)) {
    const int dg = degree(gb);
    if (dg == 0) continue;
    for (const auto& [fb, fc] : poly_terms(f)) {
      MultiIndex b(gb.size());
      for (std::size_t j = 0; j < b.size(); ++j) b[j] = gb[j] + fb[j];
      out[b] += gc * fc * (static_cast<double>(dg) / (dg + degree(fb)));
    }
  }
  return HoloFun::poly(g.dim(), std::move(out));
}

cplx apply_Tg(const HoloFun& g, const HoloFun& f, const Point& z, const TgOptions& opt) {
  if (g.dim() != f.dim() || static_cast<int>(z.size()) != g.dim())
    throw DomainError("dimension mismatch in T_g");
  if (!(norm(z) < 1.0)) throw DomainError("T_g evaluated outside the ball");
  if (!opt.force_quadrature && is_polynomial(g) && is_polynomial(f)) return tg_symbolic(g, f)(z);
  const HoloFun Rg = radial_derivative(g);
  if (is_identically_zero(Rg)) return 0.0;
  return ray_integral(f, Rg, z, opt.ray);
}

// ---- C^kappa(omega^*) ---------------------------------------------------------

KappaReport c_kappa_profile(const HoloFun& g, const RadialWeight& w, double kappa, const VolterraSpec& spec) {
  check_dim(g, w);
  if (!(kappa >= 1.0) || !std::isfinite(kappa)) throw DomainError("kappa must be >= 1");
  const int n = w.n();
  KappaReport rep;
  rep.g0 = std::abs(g(Point(n, cplx(0.0))));
  const HoloFun Rg = radial_derivative(g);
  const auto pts = kappa_lattice(g, spec.lattice);
  rep.samples.resize(pts.size());
  const bool zero = is_identically_zero(Rg);
  const bool poly = is_polynomial(Rg);
  rep.method = zero ? "zero" : (poly ? "exact_radial" : "region_mc");
  const auto parts = poly ? homogeneous_parts(Rg) : std::map<int, PolyMap>{};
  const StarTable* star = zero || poly ? nullptr : &star_table(w);

  parallel_for(pts.size(), [&](std::size_t i) {
    KappaSample& s = rep.samples[i];
    s.a = pts[i];
    s.radius = lattice_radius(pts[i]);
    s.omega = block_mass_shared(w, pts[i]);
    const std::uint64_t seed = derive_seed(spec.lattice.seed, fnv1a64(point_key(pts[i])));
    Estimate num{0.0, 0.0};
    if (zero) {
    } else if (poly) {
      num = poly_block_numerator(parts, w, pts[i], spec.cap_samples, seed);
    } else {
      QuadratureSpec qs;
      qs.region_samples = spec.region_samples;
      qs.seed = seed;
      auto F = [&](const Point& z) { return std::norm(Rg(z)) * (*star)(1.0 - norm(z)); };
      num = integrate_region(F, Block{pts[i], 0.0}, nullptr, qs);
    }
    s.numerator = num.value;
    s.numerator_error = num.error;
    s.quotient = s.numerator / std::pow(s.omega, kappa);
  });

  std::map<double, double> prof;
  for (const auto& s : rep.samples) {
    rep.sup = std::max(rep.sup, s.quotient);
    auto [it, fresh] = prof.emplace(s.radius, s.quotient);
    if (!fresh) it->second = std::max(it->second, s.quotient);
  }
  rep.profile.assign(prof.begin(), prof.end());
  rep.profile_slope = tail_slope_of(rep.profile, spec.lattice.K);
  return rep;
}

double c_kappa_seminorm(const HoloFun& g, const RadialWeight& w, double kappa, const VolterraSpec& spec) {
  return c_kappa_profile(g, w, kappa, spec).seminorm();
}

// ---- M_infinity --------------------------------------------------------------

double m_infinity(const HoloFun& h, double r, int directions, int ascent_steps, std::uint64_t seed) {
  if (!(r >= 0.0 && r < 1.0)) throw DomainError("radius must lie in [0,1)");
  const int n = h.dim();
  if (r == 0.0) return std::abs(h(Point(n, cplx(0.0))));
  std::vector<Point> cand;
  for (int j = 0; j < n; ++j) {
    cand.push_back(unit_vector(n, j));
    cand.push_back(scaled(unit_vector(n, j), -1.0));
  }
  for (const auto& c : kernel_centers(h))
    if (norm(c) > 0.0) cand.push_back(normalized(c));
  Rng rng(seed);
  for (int i = 0; i < directions; ++i) cand.push_back(random_sphere(n, rng));
  std::vector<std::pair<double, std::size_t>> val(cand.size());
  for (std::size_t i = 0; i < cand.size(); ++i) val[i] = {std::abs(h(scaled(cand[i], r))), i};
  std::sort(val.begin(), val.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
  double best = val.front().first;
  const std::size_t starts = std::min<std::size_t>(4, val.size());
  for (std::size_t s = 0; s < starts; ++s) {
    Point xi = cand[val[s].second];
    double cur = val[s].first;
    Rng local(derive_seed(seed, 101 + s));
    double step = 0.25;
    for (int it = 0; it < ascent_steps; ++it) {
      Point trial = xi;
      for (auto& c : trial) c += step * cplx(local.normal(), local.normal());
      trial = normalized(trial);
      const double v = std::abs(h(scaled(trial, r)));
      if (v > cur) {
        cur = v;
        xi = std::move(trial);
      } else {
        step *= 0.6;
      }
    }
    best = std::max(best, cur);
  }
  return best;
}

std::string regime_id(Regime r) {
  switch (r) {
    case Regime::ConstantOnly: return "constant_only";
    case Regime::GrowthBound: return "growth_bound";
    case Regime::Carleson: return "carleson";
  }
  return "unknown";
}

// ---- verdicts ----------------------------------------------------------------

SymbolReport tg_verdict(const HoloFun& g, const RadialWeight& w, double p, double q, const VolterraSpec& spec) {
  check_dim(g, w);
  if (!(p > 0.0) || !(q >= p) || !std::isfinite(q)) throw DomainError("T_g needs 0 < p <= q");
  const int n = w.n();
  const int K = spec.lattice.K;
  SymbolReport rep;
  rep.kappa = 1.0 / p - 1.0 / q;
  if (rep.kappa == 0.0)
    rep.regime = Regime::Carleson;
  else if (n * rep.kappa >= 1.0 - 1e-12)
    rep.regime = Regime::ConstantOnly;
  else
    rep.regime = Regime::GrowthBound;
  const HoloFun Rg = radial_derivative(g);
  const bool zero = is_identically_zero(Rg);

  // M_infinity(r, Rg) against omega(S_r)^kappa / (1-r)
  rep.m_infty_profile.resize(K);
  parallel_for(static_cast<std::size_t>(K), [&](std::size_t i) {
    const int k = static_cast<int>(i) + 1;
    const double c = std::ldexp(1.0, -k), r = 1.0 - c;
    ProfileRow& row = rep.m_infty_profile[i];
    row.r = r;
    row.quantity = zero ? 0.0 : m_infinity(Rg, r, spec.directions, spec.ascent_steps, derive_seed(spec.lattice.seed, 77 + k));
    row.bound = std::pow(block_mass_shared(w, scaled(unit_vector(n, 0), r)), rep.kappa) / c;
    row.ratio = row.quantity / row.bound;
  });
  std::vector<std::pair<double, double>> mprof;
  for (const auto& row : rep.m_infty_profile) mprof.push_back({row.r, row.ratio});
  rep.m_infty_slope = tail_slope_of(mprof, K);

  std::vector<std::pair<double, double>> deciding = mprof;
  switch (rep.regime) {
    case Regime::ConstantOnly:
      rep.bounded = zero;
      rep.margin = zero ? kInf : -kInf;
      rep.basis = "symbolic_zero";
      break;
    case Regime::GrowthBound:
      rep.bounded = zero || rep.m_infty_slope <= spec.trend_tol;
      rep.margin = zero ? kInf : spec.trend_tol - rep.m_infty_slope;
      rep.basis = zero ? "symbolic_zero" : "m_infinity_trend";
      break;
    case Regime::Carleson:
      rep.c1 = c_kappa_profile(g, w, 1.0, spec);
      rep.c_kappa_seminorm = rep.c1.seminorm();
      rep.bounded = zero || rep.c1.profile_slope <= spec.trend_tol;
      rep.margin = zero ? kInf : spec.trend_tol - rep.c1.profile_slope;
      rep.basis = zero ? "symbolic_zero" : "c1_trend";
      deciding = rep.c1.profile;
      break;
  }
  rep.tail_slope = tail_slope_of(deciding, K);
  rep.tail_monotone = tail_nonincreasing(deciding, K);

  // ||T_g F_{a,p}||_{A^q} / ||F_{a,p}||_{A^p} along e_1
  const int OK = spec.operator_K;
  rep.operator_profile.resize(OK);
  const double gamma = test_function_gamma(w);
  RadialSpec ray{8, 60, 1e-9};
  for (int k = 1; k <= OK; ++k) {
    const double r = 1.0 - std::ldexp(1.0, -k);
    const Point a = scaled(unit_vector(n, 0), r);
    const HoloFun F = test_function(a, p, gamma).f;
    const auto props = mixture_for(F);
    const std::uint64_t sd = derive_seed(spec.lattice.seed, 5000 + k);
    const double den = integrate_ball_mixture([&](const Point& z) { return std::pow(std::abs(F(z)), p); }, &w, n,
                                              props, spec.operator_samples, sd)
                           .value;
    double num = 0.0;
    if (!zero)
      num = integrate_ball_mixture([&](const Point& z) { return std::pow(std::abs(ray_integral(F, Rg, z, ray)), q); },
                                   &w, n, props, spec.operator_samples, sd)
                .value;
    ProfileRow& row = rep.operator_profile[k - 1];
    row.r = r;
    row.quantity = std::pow(num, 1.0 / q);
    row.bound = std::pow(den, 1.0 / p);
    row.ratio = row.quantity / row.bound;
  }
  {
    std::vector<double> x, y;
    for (const auto& row : rep.operator_profile)
      if (row.ratio > 0.0) {
        x.push_back(-std::log1p(-row.r));
        y.push_back(std::log(row.ratio));
      }
    rep.operator_slope = x.size() >= 2 ? ls_slope(x, y) : 0.0;
  }
  rep.operator_consistent = rep.bounded ? rep.operator_slope <= spec.trend_tol : rep.operator_slope > 0.0;

  if (spec.space_seminorms) {
    const SpaceSeminorms s = space_seminorms(g, spec);
    rep.bloch_seminorm = s.bloch;
    rep.bmoa_seminorm = s.bmoa;
  }
  rep.inputs_hash = symbol_hash("tg_verdict", g, w, p, q, spec);
  return rep;
}

SymbolReport tg_compact_profile(const HoloFun& g, const RadialWeight& w, double p, double q,
                                const VolterraSpec& spec) {
  SymbolReport rep = tg_verdict(g, w, p, q, spec);
  rep.inputs_hash = symbol_hash("tg_compact_profile", g, w, p, q, spec);
  return rep;
}

// ---- Bloch and BMOA ----------------------------------------------------------

SpaceSeminorms space_seminorms(const HoloFun& g, const VolterraSpec& spec) {
  const int n = g.dim();
  SpaceSeminorms out;
  const double g0 = std::abs(g(Point(n, cplx(0.0))));
  const HoloFun Rg = radial_derivative(g);
  if (is_identically_zero(Rg)) {
    out.bloch = g0;
    return out;
  }
  const std::uint64_t seed = derive_seed(spec.lattice.seed, 0xb10c);
  auto bloch_at = [&](double r) {
    const double c = 1.0 - r;
    return c * (2.0 - c) * m_infinity(Rg, r, spec.directions, spec.ascent_steps, seed);
  };
  std::vector<double> radii;
  for (int j = 1; j < 64; ++j) radii.push_back(j / 64.0);
  for (int k = 7; k <= std::max(7, spec.lattice.K); ++k) radii.push_back(1.0 - std::ldexp(1.0, -k));
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
  std::vector<double> vals(radii.size());
  parallel_for(radii.size(), [&](std::size_t i) { vals[i] = bloch_at(radii[i]); });
  const std::size_t ib = std::max_element(vals.begin(), vals.end()) - vals.begin();
  double best = vals[ib];
  const double lo = ib > 0 ? radii[ib - 1] : 0.0;
  const double hi = ib + 1 < radii.size() ? radii[ib + 1] : radii[ib];
  if (hi > lo) {
    auto res = boost::math::tools::brent_find_minima([&](double r) { return -bloch_at(r); }, lo, hi, 40);
    best = std::max(best, -res.second);
  }
  out.bloch = g0 + best;

  // tubes S*(xi, 2^-k)
  std::vector<Point> dirs;
  if (n == 1) {
    for (int j = 0; j < 16; ++j) dirs.push_back({std::polar(1.0, 2.0 * std::numbers::pi * j / 16)});
  } else {
    for (int j = 0; j < n; ++j) {
      dirs.push_back(unit_vector(n, j));
      dirs.push_back(scaled(unit_vector(n, j), -1.0));
    }
    Rng rng(derive_seed(spec.lattice.seed, 0xb30a));
    for (int i = 0; i < spec.bmoa_directions; ++i) dirs.push_back(random_sphere(n, rng));
  }
  for (const auto& c : kernel_centers(g))
    if (norm(c) > 0.0) dirs.push_back(normalized(c));
  struct Job {
    Point xi;
    double rho;
  };
  std::vector<Job> jobs;
  for (int k = 1; k <= spec.bmoa_K; ++k)
    for (const auto& d : dirs) jobs.push_back({d, std::ldexp(1.0, -k)});
  std::vector<Estimate> est(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) {
    QuadratureSpec qs;
    qs.region_samples = spec.bmoa_samples;
    qs.seed = derive_seed(spec.lattice.seed, fnv1a64(point_key(jobs[i].xi)) ^ static_cast<std::uint64_t>(i));
    auto F = [&](const Point& z) { return (1.0 - norm2(z)) * std::norm(Rg(z)); };
    const Estimate e = integrate_region(F, Tube{jobs[i].xi, jobs[i].rho}, nullptr, qs);
    const double s = std::pow(jobs[i].rho, 2 * n);
    est[i] = {e.value / s, e.error / s};
  });
  for (const auto& e : est)
    if (e.value > out.bmoa) {
      out.bmoa = e.value;
      out.bmoa_error = e.error;
    }
  return out;
}

std::vector<std::pair<double, double>> dilation_approx_profile(const HoloFun& g, const RadialWeight& w,
                                                               const std::vector<double>& radii,
                                                               const VolterraSpec& spec) {
  check_dim(g, w);
  std::vector<std::pair<double, double>> out;
  for (double r : radii) {
    if (!(r >= 0.0 && r <= 1.0)) throw DomainError("dilation radius must lie in [0,1]");
    const HoloFun h = g + cplx(-1.0) * HoloFun::dilate(g, r);
    out.push_back({r, is_identically_zero(h) ? 0.0 : c_kappa_seminorm(h, w, 1.0, spec)});
  }
  return out;
}

}  // namespace bergman
