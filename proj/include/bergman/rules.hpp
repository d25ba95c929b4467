#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "bergman/core.hpp"

namespace bergman {

// Gauss-Legendre nodes and weights on [-1,1]
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

// supported orders: 4 6 8 12 16 20 24 32 48 64
const GaussRule& gauss_legendre(int order);

template <class F>
auto gl_panel(F&& f, double a, double b, int order) {
  const GaussRule& g = gauss_legendre(order);
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  decltype(f(c)) s{};
  for (std::size_t i = 0; i < g.x.size(); ++i) s += g.w[i] * f(c + h * g.x[i]);
  return s * h;
}

struct RadialSpec {
  int order = 16;
  int max_depth = 40;
  double rel_tol = 1e-10;
};

// Integral of f over (0, h] on the dyadic panels [h 2^-k, h 2^-(k-1)],
// k = 1..max_depth. tail(s) estimates the integral over (0, s]. The sum is
// accepted once two consecutive panel totals agree to rel_tol.
template <class F, class T>
auto geometric_integral(F&& f, double h, T&& tail, const RadialSpec& spec, Estimate* err = nullptr) {
  using V = decltype(f(h));
  V sum{};
  V prev{};
  int agree = 0;
  double last_diff = INFINITY;
  for (int k = 1; k <= spec.max_depth; ++k) {
    const double hi = std::ldexp(h, 1 - k), lo = std::ldexp(h, -k);
    sum += gl_panel(f, lo, hi, spec.order);
    V total = sum + tail(lo);
    if (k > 1) {
      double diff = std::abs(total - prev);
      double scale = std::abs(total);
      last_diff = diff;
      if (diff <= spec.rel_tol * scale || (diff == 0.0 && scale == 0.0))
        ++agree;
      else
        agree = 0;
      if (agree >= 2 && k >= 4) {
        if (err) *err = Estimate{std::abs(total), diff};
        return total;
      }
    }
    prev = total;
  }
  double scale = std::abs(prev);
  throw AccuracyError("radial quadrature did not converge after " + std::to_string(spec.max_depth) +
                          " dyadic panels",
                      scale, scale > 0 ? last_diff / scale : last_diff);
}

// Fixed product rule on (0,1) with dyadic panels toward both endpoints.
// Nodes carry their complement 1-t exactly.
struct UnitNode {
  double t;
  double c;  // 1 - t
  double w;
};
std::vector<UnitNode> two_sided_rule(int depth, int order);

}  // namespace bergman
