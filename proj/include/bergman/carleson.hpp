#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bergman/norms.hpp"
#include "bergman/quadrature.hpp"
#include "bergman/weights.hpp"

namespace bergman {

// Positive measure on the ball. Three representations:
//   weighted:     h(1-|z|) g(z/|z|) omega(|z|) dV, radial part on the weight's panels
//   density:      rho dV for a general nonnegative rho, region Monte Carlo
//   point masses: finite sum of atoms
class Measure {
 public:
  enum class Kind { Weighted, Density, PointMasses };
  using RadialFactor = std::function<double(double)>;    // receives 1-|z|
  using AngularFactor = std::function<double(const Point&)>;  // receives z/|z|

  static Measure weighted(const RadialWeight& w, RadialFactor h = {}, AngularFactor g = {},
                          std::string label = "weighted");
  // total mass is checked by one integrate_ball call
  static Measure density(int n, BallIntegrand rho, const QuadratureSpec& spec, std::string label = "density");
  static Measure point_masses(std::vector<std::pair<Point, double>> atoms, std::string label = "atoms");
  static Measure zero(int n);

  Kind kind() const { return kind_; }
  int n() const { return n_; }
  const std::string& label() const { return label_; }
  double factor() const { return factor_; }
  Measure scaled(double c) const;

  // mu(B)
  double total() const { return total_; }
  // density against dV, zero off the support of atoms
  double density_at(const Point& z) const;
  const std::vector<std::pair<Point, double>>& atoms() const { return atoms_; }
  const RadialWeight* weight() const { return weight_.get(); }
  const RadialFactor& radial_factor() const { return h_; }
  const AngularFactor& angular_factor() const { return g_; }
  const QuadratureSpec& spec() const { return spec_; }

  // mu(S_a) with an error estimate; `seed` feeds any Monte Carlo step.
  // Weighted measures with no angular factor use the same radial rule as
  // omega(S_a) for the same weight, so mu = omega dV gives identical numbers.
  Estimate block_mass(const Point& a, std::uint64_t seed) const;
  // int |F|^q dmu; single-kernel F get a rule focused at the kernel center
  Estimate integrate_power(const HoloFun& F, double q, std::uint64_t seed) const;

 private:
  Kind kind_ = Kind::PointMasses;
  int n_ = 1;
  std::string label_;
  double factor_ = 1.0;
  double total_ = 0.0;
  std::shared_ptr<const RadialWeight> weight_;
  RadialFactor h_;
  AngularFactor g_;
  BallIntegrand rho_;
  QuadratureSpec spec_;
  std::vector<std::pair<Point, double>> atoms_;
};

// omega(S_a) on the path shared with weighted measures
double block_mass_shared(const RadialWeight& w, const Point& a);

struct CarlesonLattice {
  int K = 14;               // radii 1 - 2^-k, k = 1..K, plus a = 0
  int directions = 0;       // 0: 16 for n = 1, 64 for n >= 2
  std::uint64_t seed = 1;
};

// lattice points, a = 0 first, then by radius; refining K or directions
// keeps the coarser lattice as a subset
std::vector<Point> carleson_lattice(int n, const CarlesonLattice& lat);
// |a| snapped to the lattice radius 1 - 2^-k it was built from (0 stays 0)
double lattice_radius(const Point& a);

struct QuotientSample {
  Point a;
  double radius = 0.0;
  double mu = 0.0;
  double mu_error = 0.0;
  double omega = 0.0;
  double quotient = 0.0;
  bool degenerate = false;  // Monte Carlo found no hits; excluded from the maxima
};

struct CarlesonReport {
  std::vector<QuotientSample> samples;
  double sup_estimate = 0.0;  // lattice max, a lower bound for the supremum
  std::vector<std::pair<double, double>> radial_profile;  // (radius, max quotient over directions)
  double profile_slope = 0.0;  // d log(profile) / d log(1/(1-r)) over k >= K/2
  double embedding_lower = 0.0;
  int degenerate_count = 0;
  std::uint64_t inputs_hash = 0;
};

// mu(S_a) / omega(S_a)^{q/p} on the lattice; embedding_lower is left at 0
CarlesonReport carleson_quotient(const Measure& mu, const RadialWeight& w, double p, double q,
                                 const CarlesonLattice& lat = {});

// max over the lattice (a != 0) of int |F_{a,p}|^q dmu / omega(S_a)^{q/p}
double embedding_lower_bound(const Measure& mu, const RadialWeight& w, double p, double q,
                             const CarlesonLattice& lat = {});
// per-point values of the same quantity, a = 0 omitted
std::vector<std::pair<Point, double>> embedding_panel(const Measure& mu, const RadialWeight& w, double p, double q,
                                                      const CarlesonLattice& lat = {});

struct Probe {
  std::string label;
  BallIntegrand phi;
  // where phi concentrates, if anywhere: nodes then follow a focused sphere
  // rule at that point and the radial rule reaches its scale
  std::optional<Point> focus;
};

struct ProbeSpec {
  int radial_depth = 8;    // two-sided rule for the mu-integral of the maximal function
  int radial_order = 4;
  int directions = 8;      // sphere directions per radius (unfocused probes)
  int focus_order = 6;     // Gauss order of the focused rule
  int candidates = 12;     // blocks per maximal-function evaluation
  long samples_per_block = 300;
  std::uint64_t seed = 1;
  QuadratureSpec omega_quad;  // for the L^p(omega) norm of the probe
};

struct ProbeRow {
  std::string label;
  double maximal_norm = 0.0;  // || [M_omega(|phi|^{1/alpha})]^alpha ||_{L^q(mu)}
  double probe_norm = 0.0;    // || phi ||_{L^p(omega)}
  double ratio = 0.0;
};

struct ProbeReport {
  std::vector<ProbeRow> rows;
  double carleson_sup = 0.0;
};

// The mu-integral is mu(B) times a self-normalized average over the nodes
// (atoms for point masses), so phi = 1 reproduces mu(B) exactly.
ProbeReport maximal_embedding_probe(const std::vector<Probe>& probes, const Measure& mu, const RadialWeight& w,
                                    double p, double q, double alpha, const ProbeSpec& spec = {},
                                    const CarlesonLattice& lat = {});

}  // namespace bergman
