#include "bergman/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/binomial.hpp>

namespace bergman {

namespace {

void require_unit(const Point& xi, const char* what) {
  if (xi.empty()) throw DomainError(std::string(what) + ": empty point");
  if (std::abs(norm(xi) - 1.0) > 1e-9) throw DomainError(std::string(what) + ": expected a unit vector");
}

void require_closed_ball(const Point& z, const char* what) {
  if (z.empty()) throw DomainError(std::string(what) + ": empty point");
  if (norm(z) > 1.0 + 1e-12) throw DomainError(std::string(what) + ": point outside the closed ball");
}

void require_aperture(double ap) {
  if (!(ap > 2.0)) throw DomainError("aperture must exceed 2");
}

constexpr int kMaxExamples = 8;

void record(PredicateCheck& pc, const Point& c, double r, const Point& z) {
  ++pc.counterexamples;
  if (static_cast<int>(pc.examples.size()) < kMaxExamples) pc.examples.push_back({c, r, z});
}

// uniform radius in (lo, hi) on a log scale of the complement; lo < hi < 1
double log_complement(Rng& rng, double lo_c, double hi_c) {
  return std::exp(rng.uniform(std::log(lo_c), std::log(hi_c)));
}

}  // namespace

double noniso_dist(const Point& xi, const Point& tau) { return std::sqrt(std::abs(1.0 - inner(xi, tau))); }

void validate(const Region& R) {
  std::visit(
      [](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, Cap>) {
          require_unit(r.xi, "Cap");
          if (!(r.r > 0.0) || r.r > std::sqrt(2.0) + 1e-15) throw DomainError("Cap radius must lie in (0, sqrt 2]");
        } else if constexpr (std::is_same_v<T, Block>) {
          require_closed_ball(r.a, "Block");
          if (norm(r.a) >= 1.0) throw DomainError("Block center must lie in the open ball");
          if (!(r.alpha >= 0.0)) throw DomainError("Block alpha must be >= 0");
        } else if constexpr (std::is_same_v<T, Tube>) {
          require_unit(r.xi, "Tube");
          if (!(r.r > 0.0 && r.r < 1.0)) throw DomainError("Tube radius must lie in (0, 1)");
        } else if constexpr (std::is_same_v<T, Admissible>) {
          require_closed_ball(r.zeta, "Admissible");
          require_aperture(r.aperture);
        } else {
          require_closed_ball(r.z, "Tent");
          if (norm(r.z) >= 1.0) throw DomainError("Tent vertex must lie in the open ball");
          require_aperture(r.aperture);
        }
      },
      R);
}

int region_dim(const Region& R) {
  return std::visit(
      [](const auto& r) -> int {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, Cap> || std::is_same_v<T, Tube>) return static_cast<int>(r.xi.size());
        else if constexpr (std::is_same_v<T, Block>) return static_cast<int>(r.a.size());
        else if constexpr (std::is_same_v<T, Admissible>) return static_cast<int>(r.zeta.size());
        else return static_cast<int>(r.z.size());
      },
      R);
}

std::string region_kind(const Region& R) {
  static const char* names[] = {"cap", "block", "tube", "admissible", "tent"};
  return names[R.index()];
}

namespace {

bool admissible_contains(const Point& zeta, double ap, const Point& z) {
  const double zz = norm2(zeta);
  if (zz == 0.0) return norm2(z) == 0.0;
  const cplx p = inner(z, zeta) / zz;
  return std::abs(1.0 - p) < 0.5 * ap * (1.0 - norm2(z) / zz);
}

bool block_contains(const Point& a, double alpha, const Point& z) {
  const double ra = norm(a);
  const double rz = norm(z);
  if (ra == 0.0) return rz < 1.0;
  if (!(rz > ra)) return false;
  const cplx p = inner(z, a) / (rz * ra);
  return std::abs(1.0 - p) <= (alpha + 1.0) * (1.0 - ra);
}

}  // namespace

bool contains(const Region& R, const Point& z) {
  if (static_cast<int>(z.size()) != region_dim(R)) throw DomainError("dimension mismatch in contains");
  return std::visit(
      [&](const auto& r) -> bool {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, Cap>) {
          return std::abs(1.0 - inner(r.xi, z)) <= r.r * r.r;
        } else if constexpr (std::is_same_v<T, Block>) {
          return block_contains(r.a, r.alpha, z);
        } else if constexpr (std::is_same_v<T, Tube>) {
          return std::abs(1.0 - inner(z, r.xi)) < r.r;
        } else if constexpr (std::is_same_v<T, Admissible>) {
          return admissible_contains(r.zeta, r.aperture, z);
        } else {
          return admissible_contains(z, r.aperture, r.z);
        }
      },
      R);
}

// ---- cap measure ----------------------------------------------------------

double cap_measure(double r, int n) {
  if (n < 1) throw DomainError("dimension must be >= 1");
  if (!(r > 0.0)) throw DomainError("cap radius must be positive");
  const double rr = std::min(r * r, 2.0);
  if (rr >= 2.0) return 1.0;
  if (n == 1) return (2.0 / std::numbers::pi) * std::asin(rr / 2.0);

  // w = 1 - rho e^{i theta}; the rho integral of rho^{n-1} (2c - rho)^{n-2}
  // over [0, m] is expanded in (2c - m) so every term is nonnegative
  const int k = n - 2;
  std::vector<double> coef(k + 1);
  for (int j = 0; j <= k; ++j)
    coef[j] = boost::math::binomial_coefficient<double>(k, j) * boost::math::beta(double(n), double(j + 1));
  auto inner_int = [&](double c2, double m) {
    const double d = std::max(c2 - m, 0.0);
    double s = 0.0, mp = 1.0, dp = std::pow(d, k);
    for (int j = 0; j <= k; ++j) {
      s += coef[j] * dp * mp;
      mp *= m;
      dp = (d > 0.0) ? dp / d : (j + 1 == k ? 1.0 : 0.0);
    }
    return std::pow(m, n) * s;
  };
  // phi = pi/2 - theta keeps 2 cos theta = 2 sin phi accurate near the tangency
  const double phi_star = std::asin(rr / 2.0);
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  // both pieces mapped onto [0,1]: boost's error floor misbehaves on short intervals
  auto piece = [&](double lo, double hi, bool tangent, double* e) {
    const double h = hi - lo;
    double v = GK::integrate(
        [&](double x) {
          const double c2 = 2.0 * std::sin(lo + h * x);
          return inner_int(c2, tangent ? c2 : rr);
        },
        0.0, 1.0, 15, 1e-13, e);
    *e *= h;
    return v * h;
  };
  double e1 = 0.0, e2 = 0.0;
  const double a = piece(phi_star, std::numbers::pi / 2, false, &e1);
  const double b = piece(0.0, phi_star, true, &e2);
  const double total = 2.0 * (n - 1) / std::numbers::pi * (a + b);
  const double err = 2.0 * (n - 1) / std::numbers::pi * (e1 + e2);
  if (!(err <= 1e-10)) throw AccuracyError("cap measure quadrature", total, err);
  return std::min(total, 1.0);
}

double cap_measure(const Point& xi, double r) {
  require_unit(xi, "cap_measure");
  return cap_measure(r, static_cast<int>(xi.size()));
}

Point sample_cap(const Point& xi, double r, Rng& rng) {
  const int n = static_cast<int>(xi.size());
  const double rr = std::min(r * r, 2.0);
  if (n == 1) {
    const double phi = 2.0 * std::asin(rr / 2.0);
    return {xi[0] * std::polar(1.0, rng.uniform(-phi, phi))};
  }
  // density of w = <zeta, xi> is proportional to (1 - |w|^2)^{n-2};
  // polar coordinates around 1 give rho (rho (2 cos theta - rho))^{n-2}
  const double bound = std::min(2.0 * rr, 1.0);
  double rho = 0.0, theta = 0.0, q = 0.0;
  for (;;) {
    theta = rng.uniform(-std::numbers::pi / 2, std::numbers::pi / 2);
    rho = rr * std::sqrt(rng.uniform());
    const double c2 = 2.0 * std::cos(theta);
    if (rho >= c2) continue;
    q = rho * (c2 - rho);  // equals 1 - |w|^2
    if (rng.uniform() * std::pow(bound, n - 2) <= std::pow(q, n - 2)) break;
  }
  const cplx w = 1.0 - std::polar(rho, theta);
  const double tail = std::sqrt(std::max(q, 0.0));
  // uniform direction orthogonal to xi
  Point y(n, 0.0);
  double s = 0.0;
  for (int j = 1; j < n; ++j) {
    y[j] = cplx(rng.normal(), rng.normal());
    s += std::norm(y[j]);
  }
  s = std::sqrt(s);
  y[0] = w;
  for (int j = 1; j < n; ++j) y[j] *= tail / s;
  return apply_frame(unitary_frame(xi), y);
}

// ---- covering ---------------------------------------------------------------

namespace {

std::uint64_t direction_seed(const Point& e) {
  std::string key;
  char buf[64];
  for (const cplx& c : e) {
    std::snprintf(buf, sizeof buf, "%.9f,%.9f;", c.real(), c.imag());
    key += buf;
  }
  return fnv1a64(key);
}

// local cover radius factor for greedy set cover on the target samples
double shrink(int n) { return n == 1 ? 0.98 : 0.75; }

// sample of the cap in scale-free coordinates: w = 1 - rr u e^{i theta},
// transverse direction eta in C^{n-1}
struct LocalSample {
  double theta;
  double u;
  std::vector<cplx> eta;
};

std::vector<LocalSample> local_samples(int n, std::uint64_t seed, int m) {
  Rng rng(seed);
  std::vector<LocalSample> out;
  while (static_cast<int>(out.size()) < m) {
    LocalSample ls;
    ls.theta = rng.uniform(-std::numbers::pi / 2, std::numbers::pi / 2);
    ls.u = std::sqrt(rng.uniform());
    // small-cap limit of the density rho (rho (2 cos theta - rho))^{n-2}
    if (rng.uniform() > std::pow(ls.u * std::cos(ls.theta), n - 2)) continue;
    ls.eta.resize(n - 1);
    double s = 0.0;
    for (auto& v : ls.eta) {
      v = cplx(rng.normal(), rng.normal());
      s += std::norm(v);
    }
    for (auto& v : ls.eta) v /= std::sqrt(s);
    out.push_back(std::move(ls));
  }
  return out;
}

// points of S mapped from local samples at cap radius^2 rr; invalid ones are empty
std::vector<Point> map_local(const std::vector<LocalSample>& L, const std::vector<Point>& frame, double rr) {
  std::vector<Point> out;
  out.reserve(L.size());
  const int n = static_cast<int>(frame.size());
  for (const auto& ls : L) {
    const double rho = rr * ls.u, c2 = 2.0 * std::cos(ls.theta);
    if (rho >= c2) {
      out.emplace_back();
      continue;
    }
    Point y(n);
    y[0] = 1.0 - std::polar(rho, ls.theta);
    const double tail = std::sqrt(rho * (c2 - rho));
    for (int j = 1; j < n; ++j) y[j] = tail * ls.eta[j - 1];
    out.push_back(apply_frame(frame, y));
  }
  return out;
}

// greedy set cover of pts by caps {|1 - <p, q>| <= reach}; lowest index wins ties
std::vector<std::size_t> greedy_cover(const std::vector<Point>& pts, double reach) {
  const std::size_t m = pts.size();
  std::vector<std::vector<int>> covers(m);
  std::size_t left = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (pts[i].empty()) continue;
    ++left;
    for (std::size_t j = 0; j < m; ++j)
      if (!pts[j].empty() && std::abs(1.0 - inner(pts[i], pts[j])) <= reach) covers[i].push_back(static_cast<int>(j));
  }
  std::vector<char> covered(m, 0);
  std::vector<std::size_t> picked;
  while (left > 0) {
    std::size_t best = 0, best_gain = 0;
    for (std::size_t i = 0; i < m; ++i) {
      std::size_t g = 0;
      for (int j : covers[i]) g += !covered[j];
      if (g > best_gain) {
        best_gain = g;
        best = i;
      }
    }
    for (int j : covers[best])
      if (!covered[j]) {
        covered[j] = 1;
        --left;
      }
    picked.push_back(best);
  }
  return picked;
}

bool covers_all(const std::vector<Point>& pts, const std::vector<Point>& centers, double reach) {
  for (const Point& p : pts) {
    if (p.empty()) continue;
    bool hit = false;
    for (const Point& q : centers)
      if (std::abs(1.0 - inner(p, q)) <= reach) {
        hit = true;
        break;
      }
    if (!hit) return false;
  }
  return true;
}

}  // namespace

std::vector<Point> covering_blocks(const Point& a, double alpha) {
  require_closed_ball(a, "covering_blocks");
  const double ra = norm(a);
  if (ra == 0.0) throw DomainError("covering_blocks requires a != 0");
  if (ra >= 1.0) throw DomainError("covering_blocks requires |a| < 1");
  if (!(alpha >= 0.0)) throw DomainError("covering_blocks requires alpha >= 0");
  if (alpha == 0.0) return {a};

  const int n = static_cast<int>(a.size());
  const Point e = scaled(a, 1.0 / ra);
  const double c = 1.0 - ra;
  const double reach = shrink(n) * shrink(n) * c;
  std::vector<Point> centers;

  if (n == 1) {
    const int m = 1001;
    const double phi = 2.0 * std::asin(std::min((alpha + 1.0) * c, 2.0) / 2.0);
    std::vector<Point> targets;
    for (int i = 0; i < m; ++i) targets.push_back({e[0] * std::polar(1.0, -phi + 2.0 * phi * i / (m - 1))});
    for (std::size_t i : greedy_cover(targets, reach)) centers.push_back(scaled(targets[i], ra));
    return centers;
  }

  // the selection is made once at a reference scale and reused whenever it
  // still covers, so k does not drift with |a|
  const auto L = local_samples(n, direction_seed(e), 3000);
  const auto frame = unitary_frame(e);
  const double c_ref = std::ldexp(1.0, -20);
  const auto ref_pts = map_local(L, frame, std::min((alpha + 1.0) * c_ref, 2.0));
  const auto pick = greedy_cover(ref_pts, shrink(n) * shrink(n) * c_ref);
  const auto pts = map_local(L, frame, std::min((alpha + 1.0) * c, 2.0));
  bool valid = true;
  for (std::size_t i : pick) {
    if (pts[i].empty()) valid = false;
    else centers.push_back(pts[i]);
  }
  if (!valid || !covers_all(pts, centers, 0.85 * 0.85 * c)) {
    centers.clear();
    for (std::size_t i : greedy_cover(pts, reach)) centers.push_back(pts[i]);
  }
  for (Point& p : centers) p = scaled(p, ra);
  return centers;
}

CoverCheck check_covering(const Point& a, double alpha, const std::vector<Point>& centers, long samples,
                          std::uint64_t seed) {
  const double ra = norm(a);
  if (ra == 0.0 || ra >= 1.0) throw DomainError("check_covering requires 0 < |a| < 1");
  const Point e = scaled(a, 1.0 / ra);
  const double target_r = cap_radius_from_sq((alpha + 1.0) * (1.0 - ra));
  Rng rng(seed);
  CoverCheck out;
  for (long i = 0; i < samples; ++i) {
    const Point dir = sample_cap(e, target_r, rng);
    const double rho = ra + (1.0 - ra) * rng.uniform();
    const Point z = scaled(dir, rho);
    if (!contains(Block{a, alpha}, z)) continue;
    ++out.samples;
    bool hit = false;
    for (const Point& c : centers)
      if (contains(Block{c, 0.0}, z)) {
        hit = true;
        break;
      }
    out.uncovered += !hit;
  }
  return out;
}

// ---- comparison checks ----------------------------------------------------

ComparisonReport tube_block_comparison_check(long samples, std::uint64_t seed, int n) {
  if (n < 1) throw DomainError("dimension must be >= 1");
  if (samples < 0) throw DomainError("sample count must be nonnegative");
  ComparisonReport rep;
  rep.n = n;
  rep.seed = seed;
  rep.tube_in_block.name = "tube_in_block";
  rep.block_in_tube.name = "block_in_tube";

  Rng rng(derive_seed(seed, 1));
  // S*(xi, r) in S_{(1-r) xi, 2}
  while (rep.tube_in_block.samples < samples) {
    const Point xi = random_sphere(n, rng);
    // radii spread over (2^-30, 1) with extra weight on r near 1
    const double r = rng.uniform() < 0.2 ? 1.0 - log_complement(rng, 1e-9, 0.5) : log_complement(rng, 1e-9, 1.0);
    if (!(r > 0.0 && r < 1.0)) continue;
    // tube points satisfy 1 - |z| < r and lie over the cap Q(xi, sqrt(2r))
    const Point dir = sample_cap(xi, cap_radius_from_sq(2.0 * r), rng);
    const double rho = 1.0 - r * rng.uniform();
    const Point z = scaled(dir, rho);
    if (!contains(Tube{xi, r}, z)) continue;
    ++rep.tube_in_block.samples;
    const Point a = scaled(xi, 1.0 - r);
    if (!contains(Block{a, 2.0}, z)) record(rep.tube_in_block, xi, r, z);
  }

  Rng rng2(derive_seed(seed, 2));
  // S_a in S*(a/|a|, 2(1-|a|) + eps)
  while (rep.block_in_tube.samples < samples) {
    const Point e = random_sphere(n, rng2);
    const double ra = 1.0 - log_complement(rng2, std::ldexp(1.0, -30), 0.5);
    const Point a = scaled(e, ra);
    const Point dir = sample_cap(e, std::sqrt(1.0 - ra), rng2);
    const double rho = ra + (1.0 - ra) * rng2.uniform();
    const Point z = scaled(dir, rho);
    if (!contains(Block{a, 0.0}, z)) continue;
    ++rep.block_in_tube.samples;
    const double r = 2.0 * (1.0 - ra) + kTubeEps;
    if (!(std::abs(1.0 - inner(z, e)) < r)) record(rep.block_in_tube, a, ra, z);
  }
  return rep;
}

PredicateCheck admissible_dilation_check(long samples, std::uint64_t seed, int n, double aperture) {
  require_aperture(aperture);
  PredicateCheck pc;
  pc.name = "admissible_dilation";
  Rng rng(seed);
  // draws outside the ball are redrawn, so `samples` pairs are checked
  while (pc.samples < samples) {
    const Point u = random_sphere(n, rng);
    const double s = rng.uniform() < 0.3 ? 1.0 : rng.uniform(0.05, 1.0);
    const Point zeta = scaled(u, s);
    // points along the radius with a transverse kick, half of them inside
    const double t = s * rng.uniform();
    Point z = scaled(u, t);
    const Point kick = random_sphere(n, rng);
    const double amp = rng.uniform(0.0, 1.5) * (s - t);
    for (int j = 0; j < n; ++j) z[j] += amp * kick[j];
    if (norm(z) >= 1.0) continue;
    const double r = rng.uniform() < 0.1 ? 1.0 : rng.uniform();
    if (r == 0.0) continue;
    ++pc.samples;
    const bool lhs = contains(Admissible{zeta, aperture}, z);
    const bool rhs = contains(Admissible{scaled(zeta, r), aperture}, scaled(z, r));
    if (lhs != rhs) record(pc, zeta, r, z);
  }
  return pc;
}

PredicateCheck tent_in_block_check(long samples, std::uint64_t seed, int n, double aperture) {
  require_aperture(aperture);
  PredicateCheck pc;
  pc.name = "tent_in_block";
  Rng rng(seed);
  long attempts = 0;
  while (pc.samples < samples && attempts < 200 * samples + 1000) {
    ++attempts;
    // vertex z, then zeta sampled near the shadow of z
    const Point u = random_sphere(n, rng);
    const double rz = 1.0 - log_complement(rng, 1e-6, 1.0);
    const Point z = scaled(u, rz);
    const double c = 1.0 - rz;
    const Point dir = sample_cap(u, cap_radius_from_sq((aperture + 1.0) * c * 1.5), rng);
    const double rho = rz + c * rng.uniform(-0.5, 1.0);
    if (!(rho > 0.0 && rho < 1.0)) continue;
    const Point zeta = scaled(dir, rho);
    if (!contains(Tent{z, aperture}, zeta)) continue;
    ++pc.samples;
    if (!contains(Block{z, aperture}, zeta)) record(pc, z, rz, zeta);
  }
  return pc;
}

}  // namespace bergman
