#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "bergman/core.hpp"

namespace bergman {

// d(xi, tau) = |1 - <xi, tau>|^{1/2}
double noniso_dist(const Point& xi, const Point& tau);

// Q(xi, r) = { eta in S : |1 - <xi, eta>| <= r^2 }
struct Cap {
  Point xi;
  double r;
};
// S_{a,alpha}; alpha = 0 is the Carleson block S_a, a = 0 is the whole ball
struct Block {
  Point a;
  double alpha = 0.0;
};
// S*(xi, r) = { z : |1 - <z, xi>| < r }
struct Tube {
  Point xi;
  double r;
};
// Gamma_zeta with aperture > 2
struct Admissible {
  Point zeta;
  double aperture = 4.0;
};
// T_z = { zeta : z in Gamma_zeta }
struct Tent {
  Point z;
  double aperture = 4.0;
};

using Region = std::variant<Cap, Block, Tube, Admissible, Tent>;

// argument checks: unit vectors, radii, aperture > 2
void validate(const Region& R);
int region_dim(const Region& R);
std::string region_kind(const Region& R);

// predicates follow the defining inequalities verbatim (mixed strict / non-strict)
bool contains(const Region& R, const Point& z);

// sigma(Q(xi, r)) under the normalized surface measure; independent of xi
double cap_measure(double r, int n);
double cap_measure(const Point& xi, double r);

// uniform sample of Q(xi, r) w.r.t. sigma
Point sample_cap(const Point& xi, double r, Rng& rng);
// inverse of cap_measure's argument: cap radius whose squared value is min(rr, 2)
inline double cap_radius_from_sq(double rr) { return rr >= 2.0 ? 1.4142135623730951 : std::sqrt(rr); }

// centers a_i with |a_i| = |a| whose blocks S_{a_i} cover S_{a,alpha}
std::vector<Point> covering_blocks(const Point& a, double alpha);

struct CoverCheck {
  long samples = 0;
  long uncovered = 0;
};
CoverCheck check_covering(const Point& a, double alpha, const std::vector<Point>& centers, long samples,
                          std::uint64_t seed);

struct Counterexample {
  Point center;  // xi or a
  double radius;  // r or |a|
  Point z;
};

struct PredicateCheck {
  std::string name;
  long samples = 0;
  long counterexamples = 0;
  std::vector<Counterexample> examples;  // first few only
};

struct ComparisonReport {
  int n = 0;
  std::uint64_t seed = 0;
  PredicateCheck tube_in_block;  // S*(xi, r) in S_{(1-r)xi, 2}
  PredicateCheck block_in_tube;  // S_a in S*(a/|a|, 2(1-|a|) + eps)
  bool ok() const { return tube_in_block.counterexamples == 0 && block_in_tube.counterexamples == 0; }
};

ComparisonReport tube_block_comparison_check(long samples, std::uint64_t seed, int n);
// z in Gamma_zeta iff rz in Gamma_{r zeta}
PredicateCheck admissible_dilation_check(long samples, std::uint64_t seed, int n, double aperture = 4.0);
// zeta in T_z implies zeta in S_{z, aperture}
PredicateCheck tent_in_block_check(long samples, std::uint64_t seed, int n, double aperture = 4.0);

inline constexpr double kTubeEps = 1e-12;

}  // namespace bergman
