#include "bergman/holo.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "bergman/weights.hpp"

namespace bergman {

int degree(const MultiIndex& b) { return std::accumulate(b.begin(), b.end(), 0); }

struct HoloFun::Node {
  Kind kind;
  int n;
  PolyMap terms;
  Point a;
  double s = 0.0;
  double scale = 1.0;
  double r = 1.0;
  double one_minus_aa = 1.0;  // 1 - |a|^2
  std::vector<HoloFun> parts;  // inner is parts[0] for Dilate
};

namespace {

void check_dim(int n) {
  if (n < 1) throw DomainError("dimension must be >= 1");
}

void check_center(const Point& a) {
  if (a.empty()) throw DomainError("kernel center has dimension 0");
  if (!(norm(a) < 1.0)) throw DomainError("kernel center must lie in the open ball");
}

cplx monomial_value(const MultiIndex& b, const Point& z) {
  cplx v = 1.0;
  for (std::size_t j = 0; j < b.size(); ++j)
    for (int k = 0; k < b[j]; ++k) v *= z[j];
  return v;
}

}  // namespace

HoloFun HoloFun::poly(int n, PolyMap terms) {
  check_dim(n);
  for (auto it = terms.begin(); it != terms.end();) {
    if (static_cast<int>(it->first.size()) != n) throw DomainError("multi-index length differs from dimension");
    for (int e : it->first)
      if (e < 0) throw DomainError("negative exponent in multi-index");
    if (it->second == cplx(0.0)) it = terms.erase(it);
    else ++it;
  }
  auto node = std::make_shared<Node>();
  node->kind = Kind::Poly;
  node->n = n;
  node->terms = std::move(terms);
  return HoloFun(node);
}

HoloFun HoloFun::zero(int n) { return poly(n, {}); }

HoloFun HoloFun::constant(int n, cplx c) { return poly(n, {{MultiIndex(n, 0), c}}); }

HoloFun HoloFun::monomial(const MultiIndex& beta, cplx c) {
  return poly(static_cast<int>(beta.size()), {{beta, c}});
}

HoloFun HoloFun::kernel_power(const Point& a, double s, double scale) {
  check_center(a);
  if (!(s > 0.0)) throw DomainError("kernel exponent must be positive");
  auto node = std::make_shared<Node>();
  node->kind = Kind::KernelPower;
  node->n = static_cast<int>(a.size());
  node->a = a;
  node->s = s;
  node->scale = scale;
  node->one_minus_aa = 1.0 - norm2(a);
  return HoloFun(node);
}

HoloFun HoloFun::kernel_derivative(const Point& a, double s, double scale) {
  check_center(a);
  if (!(s > 0.0)) throw DomainError("kernel exponent must be positive");
  auto node = std::make_shared<Node>();
  node->kind = Kind::KernelDerivative;
  node->n = static_cast<int>(a.size());
  node->a = a;
  node->s = s;
  node->scale = scale;
  node->one_minus_aa = 1.0 - norm2(a);
  return HoloFun(node);
}

HoloFun HoloFun::dilate(const HoloFun& f, double r) {
  if (!(r > 0.0 && r <= 1.0)) throw DomainError("dilation factor must lie in (0,1]");
  if (r == 1.0) return f;
  switch (f.kind()) {
    case Kind::Poly: {
      PolyMap t;
      for (const auto& [b, c] : f.terms()) t[b] = c * std::pow(r, degree(b));
      return poly(f.dim(), std::move(t));
    }
    case Kind::Dilate:
      return dilate(f.inner(), f.dilation() * r);
    case Kind::Sum: {
      std::vector<HoloFun> ps;
      for (const auto& p : f.parts()) ps.push_back(dilate(p, r));
      return sum(ps);
    }
    default: {
      auto node = std::make_shared<Node>();
      node->kind = Kind::Dilate;
      node->n = f.dim();
      node->r = r;
      node->parts = {f};
      return HoloFun(node);
    }
  }
}

HoloFun HoloFun::sum(const std::vector<HoloFun>& parts) {
  if (parts.empty()) throw DomainError("empty sum");
  const int n = parts.front().dim();
  PolyMap poly_part;
  std::vector<HoloFun> rest;
  auto add = [&](const HoloFun& f, auto&& self) -> void {
    if (f.dim() != n) throw DomainError("dimension mismatch in sum");
    if (f.kind() == Kind::Sum) {
      for (const auto& p : f.parts()) self(p, self);
    } else if (f.kind() == Kind::Poly) {
      for (const auto& [b, c] : f.terms()) poly_part[b] += c;
    } else if (!((f.kind() == Kind::KernelPower || f.kind() == Kind::KernelDerivative) && f.scale() == 0.0)) {
      rest.push_back(f);
    }
  };
  for (const auto& p : parts) add(p, add);
  HoloFun P = poly(n, std::move(poly_part));
  if (rest.empty()) return P;
  if (!P.terms().empty()) rest.insert(rest.begin(), P);
  if (rest.size() == 1) return rest.front();
  auto node = std::make_shared<Node>();
  node->kind = Kind::Sum;
  node->n = n;
  node->parts = std::move(rest);
  return HoloFun(node);
}

int HoloFun::dim() const { return node_->n; }
HoloFun::Kind HoloFun::kind() const { return node_->kind; }
const PolyMap& HoloFun::terms() const { return node_->terms; }
const Point& HoloFun::center() const { return node_->a; }
double HoloFun::exponent() const { return node_->s; }
double HoloFun::scale() const { return node_->scale; }
double HoloFun::dilation() const { return node_->r; }
const HoloFun& HoloFun::inner() const { return node_->parts.at(0); }
const std::vector<HoloFun>& HoloFun::parts() const { return node_->parts; }

cplx HoloFun::operator()(const Point& z) const {
  if (static_cast<int>(z.size()) != dim()) throw DomainError("dimension mismatch in eval");
  const Node& nd = *node_;
  switch (nd.kind) {
    case Kind::Poly: {
      cplx v = 0.0;
      for (const auto& [b, c] : nd.terms) v += c * monomial_value(b, z);
      return v;
    }
    case Kind::KernelPower: {
      const cplx den = 1.0 - bergman::inner(z, nd.a);
      // principal branch: Re(den) > 0 on the ball
      return nd.scale * std::exp(nd.s * (std::log(nd.one_minus_aa) - std::log(den)));
    }
    case Kind::KernelDerivative: {
      const cplx w = bergman::inner(z, nd.a);
      const cplx den = 1.0 - w;
      return nd.scale * w * std::exp(nd.s * std::log(nd.one_minus_aa) - (nd.s + 1.0) * std::log(den));
    }
    case Kind::Dilate:
      return nd.parts[0](scaled(z, nd.r));
    case Kind::Sum: {
      cplx v = 0.0;
      for (const auto& p : nd.parts) v += p(z);
      return v;
    }
  }
  return 0.0;
}

std::string HoloFun::describe() const {
  std::ostringstream os;
  const Node& nd = *node_;
  switch (nd.kind) {
    case Kind::Poly: {
      os << "poly[";
      bool first = true;
      for (const auto& [b, c] : nd.terms) {
        if (!first) os << " + ";
        first = false;
        os << "(" << c.real() << (c.imag() < 0 ? "" : "+") << c.imag() << "i)";
        for (std::size_t j = 0; j < b.size(); ++j)
          if (b[j]) os << "z" << j + 1 << (b[j] > 1 ? "^" + std::to_string(b[j]) : "");
      }
      if (first) os << "0";
      os << "]";
      break;
    }
    case Kind::KernelPower:
      os << "kernel(s=" << nd.s << ", scale=" << nd.scale << ", |a|=" << norm(nd.a) << ")";
      break;
    case Kind::KernelDerivative:
      os << "kernel_derivative(s=" << nd.s << ", scale=" << nd.scale << ", |a|=" << norm(nd.a) << ")";
      break;
    case Kind::Dilate:
      os << "dilate(" << nd.r << ", " << nd.parts[0].describe() << ")";
      break;
    case Kind::Sum:
      for (std::size_t i = 0; i < nd.parts.size(); ++i) os << (i ? " + " : "") << nd.parts[i].describe();
      break;
  }
  return os.str();
}

HoloFun operator+(const HoloFun& f, const HoloFun& g) { return HoloFun::sum({f, g}); }

HoloFun operator*(cplx c, const HoloFun& f) {
  using K = HoloFun::Kind;
  switch (f.kind()) {
    case K::Poly: {
      PolyMap t;
      for (const auto& [b, v] : f.terms()) t[b] = c * v;
      return HoloFun::poly(f.dim(), std::move(t));
    }
    case K::KernelPower:
    case K::KernelDerivative: {
      if (c.imag() != 0.0) throw DomainError("kernel nodes carry real scales only");
      return f.kind() == K::KernelPower ? HoloFun::kernel_power(f.center(), f.exponent(), c.real() * f.scale())
                                        : HoloFun::kernel_derivative(f.center(), f.exponent(), c.real() * f.scale());
    }
    case K::Dilate:
      return HoloFun::dilate(c * f.inner(), f.dilation());
    case K::Sum: {
      std::vector<HoloFun> ps;
      for (const auto& p : f.parts()) ps.push_back(c * p);
      return HoloFun::sum(ps);
    }
  }
  return f;
}

HoloFun poly_product(const HoloFun& f, const HoloFun& g) {
  if (!is_polynomial(f) || !is_polynomial(g)) throw UnsupportedRegime("products are implemented for polynomials only");
  if (f.dim() != g.dim()) throw DomainError("dimension mismatch in product");
  PolyMap t;
  for (const auto& [b1, c1] : poly_terms(f))
    for (const auto& [b2, c2] : poly_terms(g)) {
      MultiIndex b(b1.size());
      for (std::size_t j = 0; j < b.size(); ++j) b[j] = b1[j] + b2[j];
      t[b] += c1 * c2;
    }
  return HoloFun::poly(f.dim(), std::move(t));
}

HoloFun radial_derivative(const HoloFun& f) {
  using K = HoloFun::Kind;
  switch (f.kind()) {
    case K::Poly: {
      PolyMap t;
      for (const auto& [b, c] : f.terms())
        if (degree(b) > 0) t[b] = c * double(degree(b));
      return HoloFun::poly(f.dim(), std::move(t));
    }
    case K::KernelPower:
      return HoloFun::kernel_derivative(f.center(), f.exponent(), f.exponent() * f.scale());
    case K::KernelDerivative: {
      // w(1-w)^{-s-1} differentiates to (s+1) w (1-w)^{-s-2} - s w (1-w)^{-s-1}
      const double s = f.exponent(), c = f.scale();
      const double q = 1.0 - norm2(f.center());
      return HoloFun::sum({HoloFun::kernel_derivative(f.center(), s + 1.0, c * (s + 1.0) / q),
                           HoloFun::kernel_derivative(f.center(), s, -c * s)});
    }
    case K::Dilate:
      return HoloFun::dilate(radial_derivative(f.inner()), f.dilation());
    case K::Sum: {
      std::vector<HoloFun> ps;
      for (const auto& p : f.parts()) ps.push_back(radial_derivative(p));
      return HoloFun::sum(ps);
    }
  }
  return f;
}

bool is_polynomial(const HoloFun& f) { return f.kind() == HoloFun::Kind::Poly; }

PolyMap poly_terms(const HoloFun& f) {
  if (!is_polynomial(f)) throw UnsupportedRegime("not a polynomial");
  return f.terms();
}

bool is_identically_zero(const HoloFun& f) {
  using K = HoloFun::Kind;
  switch (f.kind()) {
    case K::Poly:
      return f.terms().empty();
    case K::KernelPower:
      return f.scale() == 0.0;
    case K::KernelDerivative:
      return f.scale() == 0.0 || norm2(f.center()) == 0.0;
    case K::Dilate:
      return is_identically_zero(f.inner());
    case K::Sum:
      for (const auto& p : f.parts())
        if (!is_identically_zero(p)) return false;
      return true;
  }
  return false;
}

namespace {

// axis of a single node, or nullopt when not zonal; an empty Point means "any axis"
std::optional<Point> node_axis(const HoloFun& f) {
  using K = HoloFun::Kind;
  const int n = f.dim();
  switch (f.kind()) {
    case K::Poly: {
      int axis = -1;
      for (const auto& [b, c] : f.terms())
        for (int j = 0; j < n; ++j)
          if (b[j] > 0) {
            if (axis >= 0 && axis != j) return std::nullopt;
            axis = j;
          }
      if (axis < 0) return Point{};
      return unit_vector(n, axis);
    }
    case K::KernelPower:
    case K::KernelDerivative:
      if (norm2(f.center()) == 0.0) return Point{};
      return normalized(f.center());
    case K::Dilate:
      return node_axis(f.inner());
    case K::Sum: {
      Point axis;
      for (const auto& p : f.parts()) {
        auto ax = node_axis(p);
        if (!ax) return std::nullopt;
        if (ax->empty()) continue;
        if (axis.empty()) axis = *ax;
        else if (std::abs(std::abs(bergman::inner(axis, *ax)) - 1.0) > 1e-12) return std::nullopt;
      }
      return axis;
    }
  }
  return std::nullopt;
}

void collect_centers(const HoloFun& f, double r, std::vector<Point>& out) {
  using K = HoloFun::Kind;
  switch (f.kind()) {
    case K::KernelPower:
    case K::KernelDerivative:
      // (1 - <rz, a>) = (1 - <z, ra>): the dilated kernel concentrates at ra
      if (norm2(f.center()) > 0.0) out.push_back(scaled(f.center(), r));
      break;
    case K::Dilate:
      collect_centers(f.inner(), r * f.dilation(), out);
      break;
    case K::Sum:
      for (const auto& p : f.parts()) collect_centers(p, r, out);
      break;
    default:
      break;
  }
}

}  // namespace

std::optional<Point> zonal_axis(const HoloFun& f) {
  auto ax = node_axis(f);
  if (!ax) return std::nullopt;
  if (ax->empty()) return unit_vector(f.dim(), 0);
  return ax;
}

std::vector<Point> kernel_centers(const HoloFun& f) {
  std::vector<Point> out;
  collect_centers(f, 1.0, out);
  return out;
}

int poly_degree(const HoloFun& f) {
  using K = HoloFun::Kind;
  switch (f.kind()) {
    case K::Poly: {
      int d = 0;
      for (const auto& [b, c] : f.terms()) d = std::max(d, degree(b));
      return d;
    }
    case K::Dilate:
      return poly_degree(f.inner());
    case K::Sum: {
      int d = 0;
      for (const auto& p : f.parts()) d = std::max(d, poly_degree(p));
      return d;
    }
    default:
      return 0;
  }
}

namespace {

std::pair<double, double> beta_gamma(const RadialWeight& w) {
  const double beta = classify(w).doubling_exponent_beta;
  if (!std::isfinite(beta)) throw ConfigError("weight classification failed: no finite doubling exponent");
  const int n = w.n();
  // the guard keeps a fitted beta of 1 + 1e-12 from jumping a step
  return {beta, std::max(2.0 * n + 2.0, std::ceil(beta - 1e-6) + n + 3.0)};
}

}  // namespace

double test_function_gamma(const RadialWeight& w) { return beta_gamma(w).second; }

TestFunction test_function(const Point& a, double p, double gamma) {
  if (!(p > 0.0)) throw DomainError("p must be positive");
  check_center(a);
  const int n = static_cast<int>(a.size());
  const double s = (gamma + n) / p;
  return {HoloFun::kernel_power(a, s, 1.0), gamma, s, NAN};
}

TestFunction test_function(const Point& a, double p, const RadialWeight& w) {
  if (static_cast<int>(a.size()) != w.n()) throw DomainError("dimension mismatch between point and weight");
  const auto [beta, gamma] = beta_gamma(w);
  TestFunction tf = test_function(a, p, gamma);
  tf.beta = beta;
  return tf;
}

HoloFun inverse_radial_kernel(const Point& a, double s) {
  check_center(a);
  if (!(s > 1.0)) throw DomainError("inverse radial kernel needs s > 1");
  const double q = 1.0 - norm2(a);
  return HoloFun::kernel_power(a, s - 1.0, q / (s - 1.0));
}

std::string fingerprint(const HoloFun& f) {
  std::ostringstream os;
  os << std::hexfloat;
  auto pt = [&](const Point& a) {
    for (const cplx& x : a) os << x.real() << ',' << x.imag() << ';';
  };
  switch (f.kind()) {
    case HoloFun::Kind::Poly:
      os << "P" << f.dim() << '{';
      for (const auto& [b, c] : f.terms()) {
        for (int e : b) os << e << '.';
        os << ':' << c.real() << ',' << c.imag() << ';';
      }
      os << '}';
      break;
    case HoloFun::Kind::KernelPower:
    case HoloFun::Kind::KernelDerivative:
      os << (f.kind() == HoloFun::Kind::KernelPower ? "K{" : "D{") << f.exponent() << ',' << f.scale() << ';';
      pt(f.center());
      os << '}';
      break;
    case HoloFun::Kind::Dilate:
      os << "R{" << f.dilation() << ';' << fingerprint(f.inner()) << '}';
      break;
    case HoloFun::Kind::Sum:
      os << "S{";
      for (const auto& q : f.parts()) os << fingerprint(q) << '|';
      os << '}';
      break;
  }
  return os.str();
}

}  // namespace bergman
