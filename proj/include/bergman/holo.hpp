#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bergman/core.hpp"

namespace bergman {

class RadialWeight;

using MultiIndex = std::vector<int>;
// sparse polynomial, lexicographic order on exponents
using PolyMap = std::map<MultiIndex, cplx>;

int degree(const MultiIndex& b);

class HoloFun {
 public:
  enum class Kind { Poly, KernelPower, KernelDerivative, Dilate, Sum };

  static HoloFun zero(int n);
  static HoloFun constant(int n, cplx c);
  static HoloFun monomial(const MultiIndex& beta, cplx c = 1.0);
  static HoloFun poly(int n, PolyMap terms);
  // scale ((1-|a|^2)/(1-<z,a>))^s
  static HoloFun kernel_power(const Point& a, double s, double scale = 1.0);
  // scale (1-|a|^2)^s <z,a> (1-<z,a>)^{-s-1}
  static HoloFun kernel_derivative(const Point& a, double s, double scale);
  // z -> f(rz); simplifies polynomials, nested dilations and r = 1
  static HoloFun dilate(const HoloFun& f, double r);
  // flat sum; polynomial parts are merged
  static HoloFun sum(const std::vector<HoloFun>& parts);

  int dim() const;
  Kind kind() const;

  cplx operator()(const Point& z) const;

  // node accessors (valid for the matching kind)
  const PolyMap& terms() const;
  const Point& center() const;
  double exponent() const;
  double scale() const;
  double dilation() const;
  const HoloFun& inner() const;
  const std::vector<HoloFun>& parts() const;

  std::string describe() const;

 private:
  struct Node;
  explicit HoloFun(std::shared_ptr<const Node> p) : node_(std::move(p)) {}
  std::shared_ptr<const Node> node_;
};

HoloFun operator+(const HoloFun& f, const HoloFun& g);
HoloFun operator*(cplx c, const HoloFun& f);
// product of two polynomials (other kinds are rejected)
HoloFun poly_product(const HoloFun& f, const HoloFun& g);

HoloFun radial_derivative(const HoloFun& f);

bool is_polynomial(const HoloFun& f);
// polynomial terms with zero coefficients dropped
PolyMap poly_terms(const HoloFun& f);
bool is_identically_zero(const HoloFun& f);
// unit vector e with f(z) a function of <z,e> alone, if one exists
std::optional<Point> zonal_axis(const HoloFun& f);
// kernel centers (after dilation) where f concentrates
std::vector<Point> kernel_centers(const HoloFun& f);
// largest polynomial degree, 0 if none
int poly_degree(const HoloFun& f);
// exact text form (hex floats), for hashing
std::string fingerprint(const HoloFun& f);

struct TestFunction {
  HoloFun f;
  double gamma;
  double s;  // (gamma + n)/p
  double beta;
};

// gamma = max(2n+2, ceil(beta)+n+3), beta the fitted doubling exponent of w
double test_function_gamma(const RadialWeight& w);
TestFunction test_function(const Point& a, double p, const RadialWeight& w);
TestFunction test_function(const Point& a, double p, double gamma);
// (1-|a|^2)/(s-1) ((1-|a|^2)/(1-<z,a>))^{s-1}; its radial derivative is F <z,a>
HoloFun inverse_radial_kernel(const Point& a, double s);

}  // namespace bergman
