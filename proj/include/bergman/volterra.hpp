#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bergman/carleson.hpp"
#include "bergman/holo.hpp"
#include "bergman/rules.hpp"
#include "bergman/weights.hpp"

namespace bergman {

// T_g f for polynomials, termwise: c_b c_g |g|/(|b|+|g|) z^{b+g}
HoloFun tg_symbolic(const HoloFun& g, const HoloFun& f);

struct TgOptions {
  bool force_quadrature = false;
  RadialSpec ray{16, 60, 1e-13};  // dyadic panels toward t = 1
};
// T_g f(z) = int_0^1 f(tz) Rg(tz) dt/t
cplx apply_Tg(const HoloFun& g, const HoloFun& f, const Point& z, const TgOptions& opt = {});

struct VolterraSpec {
  CarlesonLattice lattice;       // blocks for C^kappa, radii for the profiles
  long cap_samples = 4096;       // angular monomial integrals on caps, n >= 2
  long region_samples = 20000;   // blocks of non-polynomial symbols
  int directions = 256;          // M_infinity: seeded directions (plus +-e_j and kernel directions)
  int ascent_steps = 20;
  double trend_tol = 0.1;        // a profile is trend-free when its tail slope is <= this
  int operator_K = 8;            // operator-quotient panel: a = (1 - 2^-k) e_1, k = 1..operator_K
  long operator_samples = 20000;
  bool space_seminorms = true;   // fill bloch/bmoa in tg_verdict
  int bmoa_K = 8;                // tubes S*(xi, 2^-k), k = 1..bmoa_K
  int bmoa_directions = 8;       // for n >= 2, plus +-e_j
  long bmoa_samples = 4000;
};

struct KappaSample {
  Point a;
  double radius = 0.0;
  double numerator = 0.0;  // int_{S_a} |Rg|^2 omega^* dV
  double numerator_error = 0.0;
  double omega = 0.0;      // omega(S_a)
  double quotient = 0.0;
};

struct KappaReport {
  double g0 = 0.0;  // |g(0)|
  double sup = 0.0; // lattice max of the quotients
  std::vector<KappaSample> samples;
  std::vector<std::pair<double, double>> profile;  // (radius, max quotient)
  double profile_slope = 0.0;  // d log / d log(1/(1-r)) over k >= K/2
  std::string method;          // exact_radial | region_mc | zero
  double seminorm() const { return g0 + sup; }
};

KappaReport c_kappa_profile(const HoloFun& g, const RadialWeight& w, double kappa, const VolterraSpec& spec = {});
double c_kappa_seminorm(const HoloFun& g, const RadialWeight& w, double kappa, const VolterraSpec& spec = {});

// lower bound for max over the sphere of |h(r xi)|
double m_infinity(const HoloFun& h, double r, int directions, int ascent_steps, std::uint64_t seed);

struct ProfileRow {
  double r = 0.0;
  double quantity = 0.0;
  double bound = 0.0;
  double ratio = 0.0;
};

enum class Regime { ConstantOnly, GrowthBound, Carleson };  // n kappa >= 1, 0 < n kappa < 1, p = q
std::string regime_id(Regime r);

struct SymbolReport {
  Regime regime = Regime::Carleson;
  double kappa = 0.0;
  bool bounded = false;
  double margin = 0.0;     // trend_tol minus the deciding slope; +-inf for the symbolic test
  std::string basis;       // symbolic_zero | m_infinity_trend | c1_trend
  double c_kappa_seminorm = 0.0;  // Carleson regime only
  KappaReport c1;                 // Carleson regime only
  std::vector<ProfileRow> m_infty_profile;  // (r, M_inf(r, Rg), omega(S_r)^kappa/(1-r), ratio)
  double m_infty_slope = 0.0;
  std::vector<ProfileRow> operator_profile;  // (|a|, ||T_g F||_q, ||F||_p, ratio)
  double operator_slope = 0.0;
  bool operator_consistent = false;
  double bloch_seminorm = 0.0;
  double bmoa_seminorm = 0.0;
  // compactness diagnostics: the deciding profile's tail, never a verdict
  double tail_slope = 0.0;
  bool tail_monotone = false;
  std::uint64_t inputs_hash = 0;
};

SymbolReport tg_verdict(const HoloFun& g, const RadialWeight& w, double p, double q, const VolterraSpec& spec = {});
// same panels; the fields to read are tail_slope and tail_monotone
SymbolReport tg_compact_profile(const HoloFun& g, const RadialWeight& w, double p, double q,
                                const VolterraSpec& spec = {});

struct SpaceSeminorms {
  double bloch = 0.0;  // |g(0)| + sup (1-|z|^2) |Rg(z)|
  double bmoa = 0.0;   // sup over tubes of int (1-|z|^2)|Rg|^2 dV / r^{2n}
  double bmoa_error = 0.0;
};
SpaceSeminorms space_seminorms(const HoloFun& g, const VolterraSpec& spec = {});

// || g - g_r ||_{C^1(omega^*)} on the given radii
std::vector<std::pair<double, double>> dilation_approx_profile(const HoloFun& g, const RadialWeight& w,
                                                               const std::vector<double>& radii,
                                                               const VolterraSpec& spec = {});

}  // namespace bergman
