#include "bergman/weights.hpp"

#include <algorithm>
#include <cmath>

// boost 1.74 pchip calls isnan unqualified
using std::isnan;

#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <sstream>

#include "bergman/geometry.hpp"

namespace bergman {

RadialWeight RadialWeight::power(double alpha, bool normalized, int n) {
  if (!(alpha > -1.0)) throw DomainError("power weight needs alpha > -1");
  if (n < 1) throw DomainError("dimension n must be positive");
  RadialWeight w;
  w.family_ = WeightFamily::Power;
  w.alpha_ = alpha;
  w.normalized_ = normalized;
  w.n_ = n;
  if (normalized)
    w.norm_const_ = std::exp(std::lgamma(n + alpha + 1.0) - std::lgamma(n + 1.0) - std::lgamma(alpha + 1.0));
  return w;
}

RadialWeight RadialWeight::logpower(double alpha, int n) {
  if (!(alpha > 1.0)) throw DomainError("logpower weight needs alpha > 1");
  if (n < 1) throw DomainError("dimension n must be positive");
  RadialWeight w;
  w.family_ = WeightFamily::LogPower;
  w.alpha_ = alpha;
  w.n_ = n;
  return w;
}

RadialWeight RadialWeight::tabulated(std::vector<std::pair<double, double>> nodes, int n) {
  if (nodes.size() < 2) throw DomainError("tabulated weight needs at least two nodes");
  if (n < 1) throw DomainError("dimension n must be positive");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!(nodes[i].first >= 0.0 && nodes[i].first < 1.0)) throw DomainError("tabulated node outside [0,1)");
    if (!(nodes[i].second > 0.0)) throw DomainError("tabulated weight values must be positive");
    if (i > 0 && !(nodes[i].first > nodes[i - 1].first))
      throw DomainError("tabulated nodes must be strictly increasing");
  }
  RadialWeight w;
  w.family_ = WeightFamily::Tabulated;
  w.n_ = n;
  w.nodes_ = nodes;
  std::vector<double> x, y;
  for (auto& [r, v] : nodes) {
    x.push_back(r);
    y.push_back(v);
  }
  if (x.size() >= 4) {
    auto p = std::make_shared<boost::math::interpolators::pchip<std::vector<double>>>(std::move(x), std::move(y));
    w.interp_ = std::make_shared<const std::function<double(double)>>([p](double r) { return (*p)(r); });
  } else {
    w.interp_ = std::make_shared<const std::function<double(double)>>([x, y](double r) {
      std::size_t i = std::upper_bound(x.begin(), x.end(), r) - x.begin();
      if (i == 0) return y.front();
      if (i >= x.size()) return y.back();
      double f = (r - x[i - 1]) / (x[i] - x[i - 1]);
      return y[i - 1] + f * (y[i] - y[i - 1]);
    });
  }
  return w;
}

std::string RadialWeight::describe() const {
  std::ostringstream os;
  switch (family_) {
    case WeightFamily::Power:
      os << "power(" << alpha_ << (normalized_ ? ", normalized" : "") << ")";
      break;
    case WeightFamily::LogPower:
      os << "logpower(" << alpha_ << ")";
      break;
    case WeightFamily::Tabulated:
      os << "tabulated(" << nodes_.size() << " nodes)";
      break;
  }
  os << " n=" << n_;
  return os.str();
}

double RadialWeight::support_end() const {
  return family_ == WeightFamily::Tabulated ? nodes_.back().first : 1.0;
}

double RadialWeight::tab_eval(double r) const { return (*interp_)(r); }

double RadialWeight::operator()(double r) const {
  if (!(r >= 0.0 && r < 1.0)) throw DomainError("omega evaluated outside [0,1)");
  if (family_ == WeightFamily::Tabulated) {
    if (r < nodes_.front().first || r > nodes_.back().first)
      throw DomainError("tabulated weight does not extrapolate beyond its nodes");
    return tab_eval(r);
  }
  return eval_c(1.0 - r);
}

double RadialWeight::eval_c(double s) const {
  switch (family_) {
    case WeightFamily::Power:
      return norm_const_ * std::pow(s * (2.0 - s), alpha_);
    case WeightFamily::LogPower:
      return 1.0 / (s * std::pow(1.0 - std::log(s), alpha_));
    case WeightFamily::Tabulated: {
      double r = 1.0 - s;
      if (r < nodes_.front().first || r > nodes_.back().first) return 0.0;
      return tab_eval(r);
    }
  }
  return 0.0;
}

double RadialWeight::tail_mass(double s) const {
  switch (family_) {
    case WeightFamily::Power: {
      const double a = alpha_;
      return norm_const_ * std::pow(2.0, a) *
             (std::pow(s, a + 1.0) / (a + 1.0) - a * std::pow(s, a + 2.0) / (2.0 * (a + 2.0)));
    }
    case WeightFamily::LogPower:
      return std::pow(1.0 - std::log(s), 1.0 - alpha_) / (alpha_ - 1.0);
    case WeightFamily::Tabulated:
      return 0.0;
  }
  return 0.0;
}

double RadialWeight::integrate_tc(const std::function<double(double, double)>& g, double ca,
                                  const RadialSpec& spec) const {
  if (!(ca >= 0.0 && ca <= 1.0)) throw DomainError("integration start outside [0,1]");
  if (ca == 0.0) return 0.0;
  switch (family_) {
    case WeightFamily::Power: {
      auto f = [&](double s) { return g(1.0 - s, s) * eval_c(s); };
      auto tail = [&](double s) { return g(1.0 - s, s) * tail_mass(s); };
      return geometric_integral(f, ca, tail, spec);
    }
    case WeightFamily::LogPower: {
      // v = L^{1-alpha}, L = 1 - log(1-t): omega dt = dv / (alpha - 1)
      const double e = -1.0 / (alpha_ - 1.0);
      const double va = std::pow(1.0 - std::log(ca), 1.0 - alpha_);
      auto f = [&](double v) {
        double c = std::exp(1.0 - std::pow(v, e));
        return g(1.0 - c, c);
      };
      auto tail = [&](double v) { return f(v) * v; };
      return geometric_integral(f, va, tail, spec) / (alpha_ - 1.0);
    }
    case WeightFamily::Tabulated: {
      const double a = 1.0 - ca;
      double total = 0.0;
      for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
        double lo = std::max(a, nodes_[i].first), hi = nodes_[i + 1].first;
        if (hi <= lo) continue;
        for (int p = 0; p < 4; ++p) {
          double pl = lo + (hi - lo) * p / 4.0, ph = lo + (hi - lo) * (p + 1) / 4.0;
          total += gl_panel([&](double t) { return g(t, 1.0 - t) * tab_eval(t); }, pl, ph, spec.order);
        }
      }
      return total;
    }
  }
  return 0.0;
}

double RadialWeight::integrate_c(const std::function<double(double)>& g, double ca, const RadialSpec& spec) const {
  return integrate_tc([&](double t, double) { return g(t); }, ca, spec);
}

double RadialWeight::integrate(const std::function<double(double)>& g, double a, const RadialSpec& spec) const {
  if (!(a >= 0.0 && a <= 1.0)) throw DomainError("integration start outside [0,1]");
  return integrate_c(g, 1.0 - a, spec);
}

double RadialWeight::integrate_plain(double a, double b, int panels) const {
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    double lo = a + (b - a) * p / panels, hi = a + (b - a) * (p + 1) / panels;
    total += gl_panel([&](double t) { return eval_c(1.0 - t); }, lo, hi, 16);
  }
  return total;
}

double RadialWeight::hat_c(double s) const {
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("hat evaluated outside [0,1]");
  return integrate_tc([](double, double) { return 1.0; }, s);
}

double RadialWeight::hat(double r) const {
  if (!(r >= 0.0 && r <= 1.0)) throw DomainError("hat evaluated outside [0,1]");
  return hat_c(1.0 - r);
}

double RadialWeight::nstar_impl(double c, int j) const {
  if (!(c >= 0.0 && c <= 1.0)) throw DomainError("log moment evaluated outside [0,1]");
  if (c == 0.0) return 0.0;
  if (c == 1.0) return INFINITY;
  const double r = 1.0 - c;
  const double logr = std::log1p(-c);
  auto outer = [&](double t, double ct) { return std::pow(t, j) * (std::log1p(-ct) - logr); };
  if (r >= 0.5) return integrate_tc(outer, c);
  // s = r e^u on [r, 1/2] removes the logarithmic kink
  const double U = std::log(0.5 / r);
  const int panels = std::max(1, static_cast<int>(std::ceil(U / 0.5)));
  double inner_part = 0.0;
  for (int p = 0; p < panels; ++p) {
    double lo = U * p / panels, hi = U * (p + 1) / panels;
    inner_part += gl_panel(
        [&](double u) {
          double s = r * std::exp(u);
          return std::pow(s, j + 1) * eval_c(1.0 - s) * u;
        },
        lo, hi, 16);
  }
  return inner_part + integrate_tc(outer, 0.5);
}

double RadialWeight::star_c(double c) const { return nstar_impl(c, 1); }
double RadialWeight::star(double r) const {
  if (!(r >= 0.0 && r <= 1.0)) throw DomainError("omega_star evaluated outside [0,1]");
  return star_c(1.0 - r);
}
double RadialWeight::nstar_c(double c) const { return nstar_impl(c, 2 * n_ - 1); }
double RadialWeight::nstar(double r) const {
  if (!(r >= 0.0 && r <= 1.0)) throw DomainError("omega_nstar evaluated outside [0,1]");
  return nstar_c(1.0 - r);
}

double RadialWeight::log_moment(int m, int j, double A) const {
  if (!(A >= 0.0 && A < 1.0)) throw DomainError("log moment start outside [0,1)");
  const double k = m + 1.0;
  const double cA = 1.0 - A;
  const double logA = A > 0.0 ? std::log1p(-cA) : -INFINITY;
  // swap the order: int_A^s r^m log(s/r) dr = s^{m+1} P(2, (m+1) log(s/A)) / (m+1)^2
  auto g = [&](double s, double cs) {
    double v = A > 0.0 ? k * (std::log1p(-cs) - logA) : INFINITY;
    double P = std::isinf(v) ? 1.0 : (v <= 0.0 ? 0.0 : boost::math::gamma_p(2.0, v));
    return std::pow(s, j + m + 1) * P / (k * k);
  };
  return integrate_tc(g, cA);
}

double RadialWeight::shell_mass(double a) const {
  const int p = 2 * n_ - 1;
  return 2.0 * n_ * integrate([p](double t) { return std::pow(t, p); }, a);
}

double RadialWeight::ball_mass() const { return shell_mass(0.0); }

std::string fingerprint(const RadialWeight& w) {
  std::ostringstream os;
  os << std::hexfloat << static_cast<int>(w.family()) << ';' << w.alpha() << ';' << w.normalized() << ';' << w.n();
  for (const auto& [r, v] : w.nodes()) os << ';' << r << ',' << v;
  return os.str();
}

std::vector<double> default_class_grid() {
  std::vector<double> g;
  for (int k = 0; k <= 30; ++k) g.push_back(1.0 - std::ldexp(1.0, -k));
  return g;
}

WeightClassReport classify(const RadialWeight& w, const std::vector<double>& grid, const ClassifyThresholds& th) {
  if (grid.size() < 8) throw ConfigError("classification grid needs at least 8 radii");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0 && grid[i] < 1.0)) throw ConfigError("classification grid must lie in [0,1)");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw ConfigError("classification grid must be increasing");
  }
  WeightClassReport rep;
  rep.grid = grid;
  for (double r : grid) {
    const double c = 1.0 - r;
    const double h = w.hat_c(c);
    const double h2 = w.hat_c(0.5 * c);
    rep.doubling_ratios.push_back(h2 > 0 ? h / h2 : INFINITY);
    const double om = w.eval_c(c);
    rep.regularity_ratios.push_back(om > 0 ? h / (c * om) : INFINITY);
  }
  rep.doubling_constant_estimate = *std::max_element(rep.doubling_ratios.begin(), rep.doubling_ratios.end());
  rep.regularity_min = *std::min_element(rep.regularity_ratios.begin(), rep.regularity_ratios.end());
  rep.regularity_max = *std::max_element(rep.regularity_ratios.begin(), rep.regularity_ratios.end());
  {
    const double c = 0.1;
    const double om = w.eval_c(c);
    rep.regularity_at_09 = om > 0 ? w.hat_c(c) / (c * om) : INFINITY;
  }

  // doubling trend over the last third of the grid
  const std::size_t m = grid.size();
  const std::size_t start = m - std::max<std::size_t>(5, m / 3);
  std::vector<double> xs, ys;
  bool finite = std::isfinite(rep.doubling_constant_estimate);
  for (std::size_t i = start; i < m && finite; ++i) {
    xs.push_back(-std::log1p(-grid[i]));
    ys.push_back(std::log(rep.doubling_ratios[i]));
  }
  rep.doubling_tail_slope = finite ? ls_slope(xs, ys) : INFINITY;
  rep.in_Dhat = finite && rep.doubling_tail_slope <= th.trend;

  rep.in_R = rep.regularity_min >= th.r_low && rep.regularity_max <= th.r_high &&
             rep.regularity_max / rep.regularity_min <= th.r_spread;
  rep.in_I = std::isfinite(rep.regularity_ratios.back()) &&
             rep.regularity_ratios.back() >= th.i_growth * rep.regularity_at_09;

  // beta from the five largest radii
  xs.clear();
  ys.clear();
  for (std::size_t i = m - 5; i < m; ++i) {
    double h = w.hat(grid[i]);
    if (!(h > 0)) continue;
    xs.push_back(std::log1p(-grid[i]));
    ys.push_back(std::log(h));
  }
  rep.doubling_exponent_beta = xs.size() >= 2 ? ls_slope(xs, ys) : NAN;
  return rep;
}

double omega_block_mass_r(const RadialWeight& w, double r) {
  if (!(r >= 0.0 && r < 1.0)) throw DomainError("block center must lie in the open ball");
  if (r == 0.0) return w.ball_mass();
  return w.shell_mass(r) * cap_measure(std::sqrt(1.0 - r), w.n());
}

double omega_block_mass(const RadialWeight& w, const Point& a) {
  if (static_cast<int>(a.size()) != w.n()) throw DomainError("dimension mismatch between point and weight");
  return omega_block_mass_r(w, norm(a));
}

}  // namespace bergman
