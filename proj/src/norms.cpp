#include "bergman/norms.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

namespace bergman {

std::string formula_id(NormFormula f) {
  switch (f) {
    case NormFormula::BergmanP: return "bergman_p";
    case NormFormula::HardyP: return "hardy_p";
    case NormFormula::LpIdentity: return "lp_identity";
    case NormFormula::LpEquivStar: return "lp_equiv_star";
    case NormFormula::LpEquivHat: return "lp_equiv_hat";
    case NormFormula::AreaP: return "area_p";
    case NormFormula::MaxfunP: return "maxfun_p";
  }
  return "unknown";
}

HoloFun subtract_value_at_zero(const HoloFun& f) {
  const cplx f0 = f(Point(f.dim(), 0.0));
  if (f0 == 0.0) return f;
  return f + HoloFun::constant(f.dim(), -f0);
}

namespace {

std::string weight_key(const RadialWeight& w) { return fingerprint(w); }

std::uint64_t inputs_hash(NormFormula id, const HoloFun& f, const RadialWeight* w, double p, const NormSpec& spec,
                          const std::string& extra = "") {
  std::ostringstream os;
  os << std::hexfloat << formula_id(id) << '|' << fingerprint(f) << '|' << (w ? weight_key(*w) : "none") << '|' << p
     << '|' << spec.quad.seed << '|' << static_cast<int>(spec.quad.sphere) << '|' << spec.quad.sphere_samples << '|'
     << spec.auto_rule << '|' << extra;
  return fnv1a64(os.str());
}

void check_p(double p) {
  if (!(p > 0.0) || !std::isfinite(p)) throw DomainError("p must be a positive finite number");
}

bool even_integer(double p) { return p == std::round(p) && static_cast<long>(p) % 2 == 0; }

// spherical rule for integrands built from f; exact_degree < 0 when no exact rule applies
QuadratureSpec choose_sphere(const HoloFun& f, int exact_degree, const NormSpec& spec, std::string* method) {
  QuadratureSpec q = spec.quad;
  if (spec.auto_rule && exact_degree >= 0) {
    q.sphere = SphereMode::Exact;
    q.exact_degree = exact_degree;
  } else if (spec.auto_rule) {
    const auto centers = kernel_centers(f);
    if (centers.size() == 1 && norm(centers[0]) > 0.0) {
      q.sphere = SphereMode::Focused;
      q.focus_axis = normalized(centers[0]);
      q.focus_scale = 1.0 - norm(centers[0]);
      q.focus.zonal = zonal_axis(f).has_value();
    }
  }
  if (method) {
    switch (q.sphere) {
      case SphereMode::Exact: *method = "exact_sphere"; break;
      case SphereMode::Focused: *method = "focused"; break;
      case SphereMode::MonteCarlo: *method = "monte_carlo"; break;
    }
  }
  return q;
}

SphereRule build_rule(int n, const QuadratureSpec& q, int focus_order) {
  switch (q.sphere) {
    case SphereMode::MonteCarlo: return sphere_mc(n, q.sphere_samples, q.seed);
    case SphereMode::Exact: return sphere_exact(n, q.exact_degree);
    case SphereMode::Focused: {
      if (static_cast<int>(q.focus_axis.size()) != n) throw ConfigError("focused rule needs an axis in C^n");
      FocusOptions o = q.focus;
      o.order = focus_order;
      return sphere_focused(q.focus_axis, q.focus_scale, o);
    }
  }
  throw ConfigError("unknown spherical mode");
}

enum class LogKernel { Identity, Star, Hat };

// radial factors at the nodes of the two-sided rule, cached per weight
const std::vector<double>& kernel_table(const RadialWeight& w, LogKernel kind, double p,
                                        const std::vector<UnitNode>& nodes, int depth, int order) {
  static std::mutex mu;
  static std::map<std::string, std::vector<double>> cache;
  std::ostringstream key;
  key << weight_key(w) << '|' << static_cast<int>(kind) << '|' << depth << '|' << order;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key.str());
    if (it != cache.end()) return it->second;
  }
  const int n = w.n();
  std::vector<double> k(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t i) {
    const double t = nodes[i].t, c = nodes[i].c;
    switch (kind) {
      case LogKernel::Identity: k[i] = 2.0 * n * nodes[i].w / t * w.nstar_c(c); break;
      case LogKernel::Star: k[i] = 2.0 * n * nodes[i].w * std::pow(t, 2 * n - 1) * w.star_c(c); break;
      case LogKernel::Hat: k[i] = 2.0 * n * nodes[i].w * std::pow(t, 2 * n - 1) * c * w.hat_c(c); break;
    }
  });
  (void)p;
  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(key.str(), std::move(k)).first->second;
}

// sum_d w_d sum_k K_k G(t_k xi_d); per-direction totals returned for MC errors
double radial_sphere_sum(const std::function<double(const Point&)>& G, const SphereRule& rule,
                         const std::vector<UnitNode>& nodes, const std::vector<double>& K,
                         std::vector<double>* per_dir) {
  std::vector<double> tot(rule.nodes.size());
  parallel_for(rule.nodes.size(), [&](std::size_t d) {
    double s = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k)
      if (K[k] != 0.0) s += K[k] * G(scaled(rule.nodes[d], nodes[k].t));
    tot[d] = s;
  });
  double v = 0.0;
  for (std::size_t d = 0; d < tot.size(); ++d) v += rule.weights[d] * tot[d];
  if (per_dir) *per_dir = std::move(tot);
  return v;
}

int lower_order(int order) { return order > 12 ? 12 : 8; }

NormReport log_kernel_formula(const HoloFun& f, const RadialWeight& w, double p, LogKernel kind,
                              const NormSpec& spec) {
  check_p(p);
  if (p < 2.0)
    throw UnsupportedRegime("formulas with |f - f(0)|^{p-2} are only evaluated for p >= 2");
  const int n = f.dim();
  if (w.n() != n) throw DomainError("weight dimension differs from function dimension");
  const NormFormula id = kind == LogKernel::Identity ? NormFormula::LpIdentity
                         : kind == LogKernel::Star   ? NormFormula::LpEquivStar
                                                     : NormFormula::LpEquivHat;
  NormReport rep;
  rep.formula = id;
  rep.inputs_hash = inputs_hash(id, f, &w, p, spec);
  const HoloFun f0 = subtract_value_at_zero(f);
  const HoloFun g = radial_derivative(f0);
  if (is_identically_zero(g)) {
    rep.method = "exact";
    return rep;
  }
  auto G = [&](const Point& z) {
    const double a = std::norm(g(z));
    return p == 2.0 ? a : a * std::pow(std::abs(f0(z)), p - 2.0);
  };
  const int deg = is_polynomial(f) && even_integer(p) ? static_cast<int>(poly_degree(f) * p / 2) : -1;
  const QuadratureSpec q = choose_sphere(f, deg, spec, &rep.method);

  const int ord = spec.radial_order, lord = lower_order(ord);
  const auto nodes = two_sided_rule(spec.radial_depth, ord);
  const auto lnodes = two_sided_rule(spec.radial_depth, lord);
  const auto& K = kernel_table(w, kind, p, nodes, spec.radial_depth, ord);
  const auto& KL = kernel_table(w, kind, p, lnodes, spec.radial_depth, lord);
  const double scale = kind == LogKernel::Identity ? p * p : 1.0;

  const SphereRule hi = build_rule(n, q, q.focus.order);
  std::vector<double> per_dir;
  const double v = radial_sphere_sum(G, hi, nodes, K, &per_dir);
  double err = std::abs(v - radial_sphere_sum(G, hi, lnodes, KL, nullptr));
  if (q.sphere == SphereMode::MonteCarlo) {
    err += mean_stderr(per_dir).error;
  } else if (q.sphere == SphereMode::Focused) {
    err += std::abs(v - radial_sphere_sum(G, build_rule(n, q, lower_order(q.focus.order)), nodes, K, nullptr));
  }
  rep.value = scale * v;
  rep.error = scale * err + std::abs(rep.value) * spec.quad.radial.rel_tol;
  return rep;
}

// canonical sample of Gamma_{e_1}: points and importance weights for dV
struct CanonicalRegion {
  std::vector<Point> eta;
  std::vector<double> c;  // 1 - |eta|
  std::vector<double> weight;
  long draws = 0;
};

CanonicalRegion canonical_region(int n, double aperture, long count, bool inside_only, std::uint64_t seed) {
  const RegionSampler sampler(Admissible{unit_vector(n, 0), aperture}, 0.5);
  Rng rng(seed);
  CanonicalRegion out;
  const long cap = 1000 * std::max<long>(count, 1);
  while ((inside_only ? static_cast<long>(out.eta.size()) : out.draws) < count && out.draws < cap) {
    RegionSample s = sampler.draw(rng);
    ++out.draws;
    if (!s.inside) continue;
    out.eta.push_back(std::move(s.z));
    out.c.push_back(s.c);
    out.weight.push_back(s.weight);
  }
  return out;
}

// |u|^{2n}/draws sum v_i |g(|u| U eta_i)|^2 with v_i carrying (1 - |eta|^2)^{1-n}
double area_inner_on(const HoloFun& g, const Point& u, const CanonicalRegion& cr, std::vector<double>* terms) {
  const int n = static_cast<int>(u.size());
  const double ru = norm(u);
  if (ru == 0.0) return 0.0;
  const auto frame = unitary_frame(scaled(u, 1.0 / ru));
  double s = 0.0;
  if (terms) terms->assign(static_cast<std::size_t>(cr.draws), 0.0);
  const double lead = std::pow(ru, 2 * n);
  for (std::size_t i = 0; i < cr.eta.size(); ++i) {
    const double ci = cr.c[i];
    const double jac = n == 1 ? 1.0 : std::pow(ci * (2.0 - ci), 1 - n);
    const double x = lead * cr.weight[i] * jac * std::norm(g(scaled(apply_frame(frame, cr.eta[i]), ru)));
    s += x;
    if (terms) (*terms)[i] = x;
  }
  return s / static_cast<double>(cr.draws);
}

double nt_max_on(const HoloFun& f, const Point& u, const CanonicalRegion& cr, std::size_t count) {
  const double ru = norm(u);
  if (ru == 0.0) return std::abs(f(u));
  double m = 0.0;
  for (int j = 0; j <= 51; ++j) m = std::max(m, std::abs(f(scaled(u, 1.0 - std::ldexp(1.0, -j)))));
  const auto frame = unitary_frame(scaled(u, 1.0 / ru));
  const std::size_t k = std::min(count, cr.eta.size());
  for (std::size_t i = 0; i < k; ++i) m = std::max(m, std::abs(f(scaled(apply_frame(frame, cr.eta[i]), ru))));
  return m;
}

void check_aperture(double aperture) {
  if (!(aperture > 2.0)) throw DomainError("aperture must exceed 2");
}

}  // namespace

NormReport bergman_norm_p(const HoloFun& f, const RadialWeight& w, double p, const NormSpec& spec) {
  check_p(p);
  const int n = f.dim();
  if (w.n() != n) throw DomainError("weight dimension differs from function dimension");
  NormReport rep;
  rep.formula = NormFormula::BergmanP;
  rep.inputs_hash = inputs_hash(rep.formula, f, &w, p, spec);
  if (is_identically_zero(f)) {
    rep.method = "exact";
    return rep;
  }
  if (is_polynomial(f) && p == 2.0) {
    double v = 0.0;
    for (const auto& [b, c] : poly_terms(f)) {
      const int m = 2 * n + 2 * degree(b) - 1;
      v += std::norm(c) * sphere_monomial_pairing(b, b) * 2.0 * n *
           w.integrate([m](double r) { return std::pow(r, m); }, 0.0, spec.quad.radial);
    }
    rep.value = v;
    rep.error = v * spec.quad.radial.rel_tol;
    rep.method = "exact";
    return rep;
  }
  const int deg = is_polynomial(f) && even_integer(p) ? static_cast<int>(poly_degree(f) * p / 2) : -1;
  const QuadratureSpec q = choose_sphere(f, deg, spec, &rep.method);
  auto F = [&](const Point& z) { return p == 2.0 ? std::norm(f(z)) : std::pow(std::abs(f(z)), p); };
  const Estimate e = integrate_ball(F, &w, n, q);
  rep.value = e.value;
  rep.error = e.error;
  return rep;
}

NormReport hardy_means(const HoloFun& f, double p, double r, const NormSpec& spec) {
  check_p(p);
  if (!(r >= 0.0 && r < 1.0)) throw DomainError("radius must lie in [0,1)");
  const int n = f.dim();
  NormReport rep;
  rep.formula = NormFormula::HardyP;
  std::ostringstream ex;
  ex << std::hexfloat << r;
  rep.inputs_hash = inputs_hash(rep.formula, f, nullptr, p, spec, ex.str());
  if (is_polynomial(f) && p == 2.0) {
    double v = 0.0;
    for (const auto& [b, c] : poly_terms(f)) v += std::norm(c) * sphere_monomial_pairing(b, b) * std::pow(r, 2 * degree(b));
    rep.value = std::sqrt(v);
    rep.error = 1e-15 * rep.value;
    rep.method = "exact";
    return rep;
  }
  const int deg = is_polynomial(f) && even_integer(p) ? static_cast<int>(poly_degree(f) * p / 2) : -1;
  const QuadratureSpec q = choose_sphere(f, deg, spec, &rep.method);
  const Estimate e = sphere_mean([&](const Point& z) { return std::pow(std::abs(f(z)), p); }, r, n, q);
  rep.value = std::pow(e.value, 1.0 / p);
  // d(x^{1/p}) = x^{1/p - 1}/p dx
  rep.error = e.value > 0.0 ? rep.value / (p * e.value) * e.error : 0.0;
  return rep;
}

NormReport lp_identity_rhs(const HoloFun& f, const RadialWeight& w, double p, const NormSpec& spec) {
  return log_kernel_formula(f, w, p, LogKernel::Identity, spec);
}

NormReport lp_equiv(const HoloFun& f, const RadialWeight& w, double p, LpVariant variant, const NormSpec& spec) {
  if (!classify(w).in_Dhat) throw UnsupportedRegime("the comparable forms need a doubling weight");
  return log_kernel_formula(f, w, p, variant == LpVariant::Star ? LogKernel::Star : LogKernel::Hat, spec);
}

Estimate area_inner(const HoloFun& f, const Point& u, double aperture, long samples, std::uint64_t seed) {
  check_aperture(aperture);
  if (static_cast<int>(u.size()) != f.dim()) throw DomainError("point dimension differs from function dimension");
  if (!(norm(u) < 1.0)) throw DomainError("u must lie in the ball");
  const CanonicalRegion cr = canonical_region(f.dim(), aperture, samples, false, seed);
  std::vector<double> terms;
  area_inner_on(radial_derivative(f), u, cr, &terms);
  return mean_stderr(terms);
}

NormReport area_norm(const HoloFun& f, const RadialWeight& w, double p, double aperture, const NormSpec& spec) {
  check_p(p);
  check_aperture(aperture);
  const int n = f.dim();
  if (w.n() != n) throw DomainError("weight dimension differs from function dimension");
  NormReport rep;
  rep.formula = NormFormula::AreaP;
  std::ostringstream ex;
  ex << std::hexfloat << aperture << '|' << spec.inner_samples << '|' << spec.outer_samples;
  rep.inputs_hash = inputs_hash(rep.formula, f, &w, p, spec, ex.str());
  rep.method = "mixture_mc";
  const HoloFun g = radial_derivative(f);
  if (is_identically_zero(g)) return rep;
  const CanonicalRegion cr = canonical_region(n, aperture, spec.inner_samples, false, derive_seed(spec.quad.seed, 1));
  auto F = [&](const Point& u) { return std::pow(area_inner_on(g, u, cr, nullptr), 0.5 * p); };
  const Estimate e = integrate_ball_mixture(F, &w, n, mixture_for(f), spec.outer_samples,
                                            derive_seed(spec.quad.seed, 2), spec.quad.boundary_bias);
  rep.value = e.value;
  rep.error = e.error;
  return rep;
}

double nontangential_max(const HoloFun& f, const Point& u, double aperture, int candidates, std::uint64_t seed) {
  check_aperture(aperture);
  if (static_cast<int>(u.size()) != f.dim()) throw DomainError("point dimension differs from function dimension");
  if (!(norm(u) <= 1.0)) throw DomainError("u must lie in the closed ball");
  if (norm(u) == 0.0) throw DomainError("the approach region of 0 is a single point");
  if (candidates < 0) throw ConfigError("candidate count must be nonnegative");
  const CanonicalRegion cr = canonical_region(f.dim(), aperture, candidates, true, seed);
  return nt_max_on(f, u, cr, static_cast<std::size_t>(candidates));
}

NormReport maxfun_norm(const HoloFun& f, const RadialWeight& w, double p, double aperture, const NormSpec& spec) {
  check_p(p);
  check_aperture(aperture);
  const int n = f.dim();
  if (w.n() != n) throw DomainError("weight dimension differs from function dimension");
  NormReport rep;
  rep.formula = NormFormula::MaxfunP;
  std::ostringstream ex;
  ex << std::hexfloat << aperture << '|' << spec.candidates << '|' << spec.outer_samples;
  rep.inputs_hash = inputs_hash(rep.formula, f, &w, p, spec, ex.str());
  rep.method = "mixture_mc";
  const CanonicalRegion cr = canonical_region(n, aperture, spec.candidates, true, derive_seed(spec.quad.seed, 1));
  auto F = [&](const Point& u) {
    return std::pow(nt_max_on(f, u, cr, static_cast<std::size_t>(spec.candidates)), p);
  };
  const Estimate e = integrate_ball_mixture(F, &w, n, mixture_for(f), spec.outer_samples,
                                            derive_seed(spec.quad.seed, 2), spec.quad.boundary_bias);
  rep.value = e.value;
  rep.error = e.error;
  return rep;
}

double maximal_function(const BallIntegrand& phi, const RadialWeight& w, const Point& z, int candidates,
                        std::uint64_t seed, long samples_per_block) {
  const int n = static_cast<int>(z.size());
  if (w.n() != n) throw DomainError("weight dimension differs from point dimension");
  const double rz = norm(z);
  if (!(rz < 1.0)) throw DomainError("z must lie in the ball");
  if (candidates < 1 || samples_per_block < 1) throw ConfigError("candidate and sample counts must be positive");
  // levels |a| = 1 - 2^-k below |z|; level 0 is the whole ball
  std::vector<double> radii{0.0};
  for (int k = 1; k <= 52; ++k) {
    const double ra = 1.0 - std::ldexp(1.0, -k);
    if (!(ra < rz)) break;
    radii.push_back(ra);
  }
  const Point e = rz > 0.0 ? scaled(z, 1.0 / rz) : unit_vector(n, 0);
  struct Cand {
    Point a;
    std::uint64_t stream;
  };
  std::vector<Cand> cands;
  Rng rng(seed);
  for (int round = 0; static_cast<int>(cands.size()) < candidates; ++round) {
    bool added = false;
    for (std::size_t k = 0; k < radii.size() && static_cast<int>(cands.size()) < candidates; ++k) {
      const double ra = radii[k];
      if (ra == 0.0 && round > 0) continue;
      Point dir = round == 0 ? e : sample_cap(e, std::sqrt(1.0 - ra), rng);
      Point a = scaled(dir, ra);
      if (ra > 0.0 && !contains(Block{a, 0.0}, z)) continue;
      cands.push_back({std::move(a), static_cast<std::uint64_t>(cands.size())});
      added = true;
    }
    if (!added && round > 0 && radii.size() == 1) break;
    if (round > 4 * candidates) break;
  }
  std::vector<double> avg(cands.size(), 0.0);
  parallel_for(cands.size(), [&](std::size_t i) {
    const RegionSampler s(Block{cands[i].a, 0.0}, 0.5, &w);
    Rng r(derive_seed(seed, 1000 + cands[i].stream));
    double num = 0.0, den = 0.0;
    for (long j = 0; j < samples_per_block; ++j) {
      const RegionSample smp = s.draw(r);
      if (!smp.inside) continue;
      num += smp.weight * std::abs(phi(smp.z));
      den += smp.weight;
    }
    avg[i] = den > 0.0 ? num / den : 0.0;
  });
  double m = 0.0;
  for (double v : avg) m = std::max(m, v);
  return m;
}

}  // namespace bergman
