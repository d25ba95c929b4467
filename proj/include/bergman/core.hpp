#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace bergman {

using cplx = std::complex<double>;
using Point = std::vector<cplx>;

inline constexpr const char* kVersion = "1.0.0";

// ---- errors -------------------------------------------------------------

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// bad argument outside the mathematical domain of an operation
struct DomainError : Error {
  using Error::Error;
};

// malformed or inconsistent configuration (schema violations included)
struct ConfigError : Error {
  using Error::Error;
};

// quadrature did not reach its tolerance; carries what it got
struct AccuracyError : Error {
  double estimate;
  double achieved;
  AccuracyError(const std::string& what, double est, double ach)
      : Error(what), estimate(est), achieved(ach) {}
};

struct UnsupportedRegime : Error {
  using Error::Error;
};

struct DegenerateRegion : Error {
  using Error::Error;
};

// ---- C^n helpers --------------------------------------------------------

// <z,w> = sum z_j conj(w_j)
cplx inner(const Point& z, const Point& w);
double norm2(const Point& z);
double norm(const Point& z);
Point scaled(const Point& z, double t);
Point unit_vector(int n, int j);
Point real_point(std::initializer_list<double> xs);
Point normalized(const Point& z);

// columns of a unitary matrix whose first column is e (|e| = 1)
std::vector<Point> unitary_frame(const Point& e);
// U y where U = unitary_frame(e) as columns
Point apply_frame(const std::vector<Point>& frame, const Point& y);

// ---- randomness ---------------------------------------------------------

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(splitmix64(seed)) {}
  double uniform() { return (eng_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  double normal() { return gauss_(eng_); }
  std::uint64_t bits() { return eng_(); }

 private:
  std::mt19937_64 eng_;
  std::normal_distribution<double> gauss_{0.0, 1.0};
};

Point random_sphere(int n, Rng& rng);

// ---- threads ------------------------------------------------------------

// global worker count; 0 means "from environment or hardware"
void set_threads(int n);
int threads();

// runs body(i) for i in [0,count) on the worker pool. body must write its
// result into slot i of caller storage; merging is the caller's job.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

// ---- small statistics ---------------------------------------------------

struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

// least-squares slope of y against x
// sample mean and its standard error (two-pass)
Estimate mean_stderr(const std::vector<double>& v);

double ls_slope(const std::vector<double>& x, const std::vector<double>& y);

struct BracketCheck {
  double min = 0.0;
  double max = 0.0;
  double spread = 0.0;  // max/min
  double slope = 0.0;   // d log(ratio) / d(-log(1-|a|))
  bool ok = false;
};

// ratios indexed by radius; trend is fitted against -log(1-r)
BracketCheck bracket_check(const std::vector<double>& radii, const std::vector<double>& ratios,
                           double max_spread, double max_abs_slope);

std::uint64_t fnv1a64(const std::string& s);
std::string hex64(std::uint64_t h);

}  // namespace bergman
