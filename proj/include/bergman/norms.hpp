#pragma once

#include <cstdint>
#include <string>

#include "bergman/holo.hpp"
#include "bergman/quadrature.hpp"
#include "bergman/weights.hpp"

namespace bergman {

enum class NormFormula { BergmanP, HardyP, LpIdentity, LpEquivStar, LpEquivHat, AreaP, MaxfunP };
std::string formula_id(NormFormula f);

struct NormReport {
  double value = 0.0;
  double error = 0.0;
  NormFormula formula = NormFormula::BergmanP;
  std::uint64_t inputs_hash = 0;
  std::string method;  // exact | exact_sphere | focused | monte_carlo | mixture_mc
};

struct NormSpec {
  QuadratureSpec quad;
  // pick exact spherical rules for polynomials at even p and focused rules
  // for single-kernel functions; otherwise quad.sphere is used as given
  bool auto_rule = true;
  int radial_depth = 40;  // two-sided rule for the log-kernel formulas
  int radial_order = 16;
  long outer_samples = 20000;  // area function and maximal function, outer MC
  long inner_samples = 1024;   // area function, samples of the approach region
  int candidates = 256;        // nontangential maximum, region samples per point
};

// f - f(0), done symbolically
HoloFun subtract_value_at_zero(const HoloFun& f);

// int_B |f|^p omega dV
NormReport bergman_norm_p(const HoloFun& f, const RadialWeight& w, double p, const NormSpec& spec = {});
// M_p(r, f) = (int_S |f(r xi)|^p dsigma)^{1/p}
NormReport hardy_means(const HoloFun& f, double p, double r, const NormSpec& spec = {});
// p^2 int_B |Rf|^2 |f - f(0)|^{p-2} |z|^{-2n} omega^{n*} dV, p >= 2
NormReport lp_identity_rhs(const HoloFun& f, const RadialWeight& w, double p, const NormSpec& spec = {});

enum class LpVariant { Star, Hat };
// int_B |Rf|^2 |f - f(0)|^{p-2} K dV with K = omega^* or (1-|z|) omega-hat
NormReport lp_equiv(const HoloFun& f, const RadialWeight& w, double p, LpVariant variant,
                    const NormSpec& spec = {});

// int_{Gamma_u} |Rf|^2 (1 - |xi|^2/|u|^2)^{1-n} dV(xi)
Estimate area_inner(const HoloFun& f, const Point& u, double aperture, long samples, std::uint64_t seed);
// int_B (area_inner(u))^{p/2} omega(u) dV(u)
NormReport area_norm(const HoloFun& f, const RadialWeight& w, double p, double aperture, const NormSpec& spec = {});

// lower bound for sup over Gamma_u of |f|: the ray points (1 - 2^-j) u,
// j = 0..51, and the first `candidates` seeded points of Gamma_u
double nontangential_max(const HoloFun& f, const Point& u, double aperture, int candidates, std::uint64_t seed);
// int_B N(f)^p omega dV
NormReport maxfun_norm(const HoloFun& f, const RadialWeight& w, double p, double aperture, const NormSpec& spec = {});

// lower bound for M_omega(phi)(z): sup of omega-averages of |phi| over blocks
// S_a containing z, with |a| on a dyadic grid below |z|; averages are
// self-normalized so constants are reproduced exactly
double maximal_function(const BallIntegrand& phi, const RadialWeight& w, const Point& z, int candidates,
                        std::uint64_t seed, long samples_per_block = 1000);

}  // namespace bergman
