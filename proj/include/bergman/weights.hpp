#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "bergman/core.hpp"
#include "bergman/rules.hpp"

namespace bergman {

enum class WeightFamily { Power, LogPower, Tabulated };

class RadialWeight {
 public:
  static RadialWeight power(double alpha, bool normalized, int n);
  static RadialWeight logpower(double alpha, int n);
  // nodes (r_i, w_i): r strictly increasing in [0,1), w_i > 0
  static RadialWeight tabulated(std::vector<std::pair<double, double>> nodes, int n);

  WeightFamily family() const { return family_; }
  double alpha() const { return alpha_; }
  bool normalized() const { return normalized_; }
  int n() const { return n_; }
  const std::vector<std::pair<double, double>>& nodes() const { return nodes_; }
  std::string describe() const;

  // omega(r), r in [0,1)
  double operator()(double r) const;
  // omega(1-s), s in (0,1]; keeps relative precision of 1-r near the boundary
  double eval_c(double s) const;

  // tail integral of omega over [r,1]
  double hat(double r) const;
  double hat_c(double s) const;
  // int_r^1 s log(s/r) omega(s) ds; +inf at r = 0
  double star(double r) const;
  double star_c(double c) const;
  // int_r^1 s^{2n-1} log(s/r) omega(s) ds
  double nstar(double r) const;
  double nstar_c(double c) const;

  // int_a^1 g(t) omega(t) dt for bounded g
  double integrate(const std::function<double(double)>& g, double a, const RadialSpec& spec = {}) const;
  // same with a given as its complement 1-a
  double integrate_c(const std::function<double(double)>& g, double ca, const RadialSpec& spec = {}) const;
  // g receives (t, 1-t) with the complement exact
  double integrate_tc(const std::function<double(double, double)>& g, double ca,
                      const RadialSpec& spec = {}) const;
  // int_a^b omega by plain Gauss panels (independent path used by checks)
  double integrate_plain(double a, double b, int panels = 64) const;

  // int_A^1 r^m omega^{j*}(r) dr where omega^{j*}(r) = int_r^1 s^j log(s/r) omega(s) ds
  double log_moment(int m, int j, double A) const;

  // ball mass 2n int_0^1 r^{2n-1} omega dr
  double ball_mass() const;
  // 2n int_a^1 r^{2n-1} omega dr
  double shell_mass(double a) const;

  // asymptotic estimate of int_{1-s}^1 omega, used as a tail correction
  double tail_mass(double s) const;
  double support_end() const;  // last tabulated node, or 1

 private:
  RadialWeight() = default;
  double nstar_impl(double c, int power) const;
  double tab_eval(double r) const;

  WeightFamily family_ = WeightFamily::Power;
  double alpha_ = 0.0;
  bool normalized_ = false;
  double norm_const_ = 1.0;
  int n_ = 1;
  std::vector<std::pair<double, double>> nodes_;
  std::shared_ptr<const std::function<double(double)>> interp_;
};

struct WeightClassReport {
  std::vector<double> grid;
  std::vector<double> doubling_ratios;    // hat(r)/hat((1+r)/2)
  std::vector<double> regularity_ratios;  // hat(r)/((1-r) omega(r))
  double doubling_constant_estimate = 0.0;
  double regularity_min = 0.0;
  double regularity_max = 0.0;
  double regularity_at_09 = 0.0;
  bool in_Dhat = false;
  bool in_R = false;
  bool in_I = false;
  double doubling_exponent_beta = 0.0;
  double doubling_tail_slope = 0.0;
};

struct ClassifyThresholds {
  double r_low = 1.0 / 50.0;
  double r_high = 50.0;
  double r_spread = 20.0;
  double i_growth = 5.0;
  double trend = 0.15;
};

// exact text form (hex floats), for hashing and caches
std::string fingerprint(const RadialWeight& w);

// radii 1 - 2^-k, k = 0..30
std::vector<double> default_class_grid();
WeightClassReport classify(const RadialWeight& w, const std::vector<double>& grid,
                           const ClassifyThresholds& th = {});
inline WeightClassReport classify(const RadialWeight& w) { return classify(w, default_class_grid()); }

// omega(S_a) = 2n int_{|a|}^1 r^{2n-1} omega dr * sigma(Q(a/|a|, sqrt(1-|a|))); omega(B) at a = 0
double omega_block_mass(const RadialWeight& w, const Point& a);
// same quantity from the modulus alone
double omega_block_mass_r(const RadialWeight& w, double r);

}  // namespace bergman
