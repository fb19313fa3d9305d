#pragma once

// Seeded random source for reproducible experiments. SplitMix64 is pinned
// (not std::mt19937 + <random> distributions) because output must be
// bit-identical across platforms and standard-library versions; restart r of
// a run with seed s owns the independent stream seeded with s + r.

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace framelab {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1), 53-bit resolution.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform in [lo, hi).
  double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  /// Standard normal via Box-Muller; generates pairs, hands out one at a time.
  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = next_double();
    while (u1 <= 0.0) u1 = next_double();  // log(0) guard; astronomically rare
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * kPi * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  void fill_gaussian(std::span<double> out) {
    for (double& x : out) x = next_gaussian();
  }

  /// Unit vector uniform on the sphere in R^d (normalized gaussian).
  std::vector<double> next_unit_vector(int d) {
    std::vector<double> v(static_cast<std::size_t>(d));
    double n2 = 0.0;
    do {
      fill_gaussian(v);
      n2 = 0.0;
      for (double x : v) n2 += x * x;
    } while (n2 < 1e-300);
    const double inv = 1.0 / std::sqrt(n2);
    for (double& x : v) x *= inv;
    return v;
  }

 private:
  static constexpr double kPi = 3.141592653589793238462643383279502884;

  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace framelab
