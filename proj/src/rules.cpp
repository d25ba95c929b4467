#include "bergman/rules.hpp"

#include <boost/math/quadrature/gauss.hpp>

namespace bergman {

namespace {

template <int N>
GaussRule expand() {
  using G = boost::math::quadrature::gauss<double, N>;
  const auto& xa = G::abscissa();
  const auto& wa = G::weights();
  GaussRule r;
  // boost stores the nonnegative half; a zero node appears first for odd N
  for (std::size_t i = 0; i < xa.size(); ++i) {
    if (xa[i] == 0.0) {
      r.x.push_back(0.0);
      r.w.push_back(wa[i]);
    } else {
      r.x.push_back(-xa[i]);
      r.w.push_back(wa[i]);
      r.x.push_back(xa[i]);
      r.w.push_back(wa[i]);
    }
  }
  return r;
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
  static const GaussRule r4 = expand<4>(), r6 = expand<6>(), r8 = expand<8>(), r12 = expand<12>(),
                         r16 = expand<16>(), r20 = expand<20>(), r24 = expand<24>(), r32 = expand<32>(),
                         r48 = expand<48>(), r64 = expand<64>();
  switch (order) {
    case 4: return r4;
    case 6: return r6;
    case 8: return r8;
    case 12: return r12;
    case 16: return r16;
    case 20: return r20;
    case 24: return r24;
    case 32: return r32;
    case 48: return r48;
    case 64: return r64;
    default: throw ConfigError("unsupported Gauss-Legendre order " + std::to_string(order));
  }
}

std::vector<UnitNode> two_sided_rule(int depth, int order) {
  const GaussRule& g = gauss_legendre(order);
  std::vector<UnitNode> nodes;
  for (int k = 1; k <= depth; ++k) {
    const double lo = std::ldexp(1.0, -k - 1), hi = std::ldexp(1.0, -k);
    const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    for (std::size_t i = 0; i < g.x.size(); ++i) {
      double t = c + h * g.x[i];
      nodes.push_back({t, 1.0 - t, g.w[i] * h});
      // mirror panel near 1: complement equals t
      nodes.push_back({1.0 - t, t, g.w[i] * h});
    }
  }
  return nodes;
}

}  // namespace bergman
