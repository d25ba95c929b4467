#include "bergman/core.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <thread>

namespace bergman {

cplx inner(const Point& z, const Point& w) {
  cplx s = 0.0;
  for (std::size_t j = 0; j < z.size(); ++j) s += z[j] * std::conj(w[j]);
  return s;
}

double norm2(const Point& z) {
  double s = 0.0;
  for (const auto& c : z) s += std::norm(c);
  return s;
}

double norm(const Point& z) { return std::sqrt(norm2(z)); }

Point scaled(const Point& z, double t) {
  Point r(z);
  for (auto& c : r) c *= t;
  return r;
}

Point unit_vector(int n, int j) {
  Point e(n, 0.0);
  e[j] = 1.0;
  return e;
}

Point real_point(std::initializer_list<double> xs) {
  Point p;
  for (double x : xs) p.emplace_back(x, 0.0);
  return p;
}

Point normalized(const Point& z) {
  double r = norm(z);
  if (r == 0.0) throw DomainError("cannot normalize the zero vector");
  return scaled(z, 1.0 / r);
}

std::vector<Point> unitary_frame(const Point& e) {
  const int n = static_cast<int>(e.size());
  std::vector<Point> cols{e};
  // Gram-Schmidt on the standard basis, skipping the most parallel vector
  int skip = 0;
  for (int j = 1; j < n; ++j)
    if (std::abs(e[j]) > std::abs(e[skip])) skip = j;
  for (int j = 0; j < n && static_cast<int>(cols.size()) < n; ++j) {
    if (j == skip) continue;
    Point v = unit_vector(n, j);
    for (const auto& c : cols) {
      cplx proj = inner(v, c);
      for (int k = 0; k < n; ++k) v[k] -= proj * c[k];
    }
    cols.push_back(normalized(v));
  }
  return cols;
}

Point apply_frame(const std::vector<Point>& frame, const Point& y) {
  const std::size_t n = y.size();
  Point out(n, 0.0);
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t k = 0; k < n; ++k) out[k] += frame[c][k] * y[c];
  return out;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream + 0x5851F42D4C957F2DULL));
}

Point random_sphere(int n, Rng& rng) {
  Point z(n);
  double r2 = 0.0;
  do {
    for (auto& c : z) c = cplx(rng.normal(), rng.normal());
    r2 = norm2(z);
  } while (r2 < 1e-300);
  return scaled(z, 1.0 / std::sqrt(r2));
}

namespace {
std::atomic<int> g_threads{0};

int default_threads() {
  if (const char* env = std::getenv("BERGMAN_LAB_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  unsigned h = std::thread::hardware_concurrency();
  return h == 0 ? 1 : static_cast<int>(h);
}
}  // namespace

void set_threads(int n) { g_threads = n; }

int threads() {
  int t = g_threads.load();
  return t > 0 ? t : default_threads();
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const int nt = std::min<std::size_t>(threads(), count);
  if (nt <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= count || failed.load()) return;
      try {
        body(i);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

Estimate mean_stderr(const std::vector<double>& v) {
  if (v.empty()) return {};
  const double N = static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += x;
  const double mean = s / N;
  double d2 = 0.0;
  for (double x : v) d2 += (x - mean) * (x - mean);
  return {mean, N > 1 ? std::sqrt(d2 / (N - 1) / N) : 0.0};
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t m = x.size();
  if (m < 2) return 0.0;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= m;
  my /= m;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < m; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0 ? sxy / sxx : 0.0;
}

BracketCheck bracket_check(const std::vector<double>& radii, const std::vector<double>& ratios,
                           double max_spread, double max_abs_slope) {
  BracketCheck b;
  if (ratios.empty()) return b;
  b.min = *std::min_element(ratios.begin(), ratios.end());
  b.max = *std::max_element(ratios.begin(), ratios.end());
  b.spread = b.min > 0 ? b.max / b.min : INFINITY;
  std::vector<double> x, y;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    x.push_back(-std::log1p(-radii[i]));
    y.push_back(std::log(ratios[i]));
  }
  b.slope = ls_slope(x, y);
  b.ok = b.min > 0 && b.spread <= max_spread && std::abs(b.slope) <= max_abs_slope;
  return b;
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace bergman
