#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bergman/core.hpp"
#include "bergman/geometry.hpp"
#include "bergman/holo.hpp"
#include "bergman/rules.hpp"
#include "bergman/weights.hpp"

namespace bergman {

// int_S zeta^beta conj(zeta^beta') dsigma
double sphere_monomial_pairing(const MultiIndex& b1, const MultiIndex& b2);

// discrete probability measure on the unit sphere
struct SphereRule {
  std::vector<Point> nodes;
  std::vector<double> weights;
  bool monte_carlo = false;
};

SphereRule sphere_mc(int n, long samples, std::uint64_t seed);

// exact for polynomials in (zeta, conj zeta) of bidegree <= (d, d):
// zeta_1 = sqrt(t) e^{i phi} recursively, Gauss in t, equispaced phases
SphereRule sphere_exact(int n, int d);

struct FocusOptions {
  int order = 12;        // Gauss order per panel
  int depth_below = 4;   // panels reach scale * 2^-depth_below, growing by 4x
  int eta_samples = 8;    // transverse directions (1 when zonal)
  bool zonal = false;
  std::uint64_t seed = 1;
};

// rule concentrated at the boundary point `axis` on the length scale `scale`:
// polar coordinates w = 1 - rho e^{i theta} in w = <xi, axis>, graded toward
// rho = 0 and toward theta = +-pi/2 (where the disk boundary meets w = 1)
SphereRule sphere_focused(const Point& axis, double scale, const FocusOptions& opt);

enum class SphereMode { MonteCarlo, Focused, Exact };

struct QuadratureSpec {
  RadialSpec radial;
  SphereMode sphere = SphereMode::MonteCarlo;
  long sphere_samples = 4096;
  std::uint64_t seed = 1;
  int exact_degree = 0;   // Exact only
  Point focus_axis;       // Focused only
  double focus_scale = 1.0;
  FocusOptions focus;
  long region_samples = 20000;
  double boundary_bias = 0.5;
};

using BallIntegrand = std::function<double(const Point&)>;

// int_B F omega dV (omega = 1 when w is null) via the slice formula:
// radial weight integrals along the directions of a sphere rule
Estimate integrate_ball(const BallIntegrand& F, const RadialWeight* w, int n, const QuadratureSpec& spec);
// same on a given rule, no error estimate
double integrate_ball_rule(const BallIntegrand& F, const RadialWeight* w, const SphereRule& rule,
                           const RadialSpec& radial);

// int_S F(r xi) dsigma
Estimate sphere_mean(const std::function<double(const Point&)>& F, double r, int n, const QuadratureSpec& spec);

// Monte Carlo over a region. The radius is drawn from an even mixture of a
// density ~ (1-r)^-bias and the omega-mass of dyadic shells on the radial
// shadow; the direction is uniform on a cap containing the region's slice.
Estimate integrate_region(const BallIntegrand& F, const Region& R, const RadialWeight* w,
                          const QuadratureSpec& spec);

// sampler used by integrate_region; exposed for maximal-function candidates
struct RegionSample {
  Point z;        // |z| <= 1 - 2^-53 even when c is smaller
  double c;       // 1 - |z|, kept exact for weight evaluation
  double weight;  // importance weight for omega dV (dV when no weight)
  bool inside;
};
class RegionSampler {
 public:
  RegionSampler(const Region& R, double boundary_bias, const RadialWeight* w = nullptr);
  RegionSample draw(Rng& rng) const;
  // proposal density at (z, c) against du dsigma (a probability for the deep cell)
  double pdf(const Point& z, double c) const;
  // omega dV (or dV) against du dsigma at c; for the deep cell its total mass
  double target(double c) const;
  const Region& region() const { return region_; }

 private:
  double cap_sq(double r) const;
  double main_pdf(double u) const;

  Region region_;
  const RadialWeight* w_;
  int n_;
  double bias_;
  double lo_ = 0.0, hi_ = 1.0;  // radial shadow [lo, hi)
  Point axis_;
  // complement u = 1 - r: main range [umin_, umax_], deep range below umin_
  double umin_ = 0.0, umax_ = 1.0;
  double p_deep_ = 0.0, deep_mass_ = 0.0;
  std::vector<double> cell_edge_;  // descending from umax_
  std::vector<double> cell_cdf_;
  bool has_table_ = false;
};

// int_B F omega dV by importance sampling from an equal-weight mixture of
// region samplers; the first proposal should cover the whole ball
Estimate integrate_ball_mixture(const BallIntegrand& F, const RadialWeight* w, int n,
                                const std::vector<Region>& proposals, long samples, std::uint64_t seed,
                                double boundary_bias = 0.5);

// Block(0) plus dyadic enlargements toward each kernel center of f
std::vector<Region> mixture_for(const HoloFun& f);

}  // namespace bergman
