#pragma once

// Helpers shared by the unit tests. Nothing here calls into the library's
// own random number generator, so test inputs stay independent of it.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "bpinn/types.hpp"

namespace testing {

// splitmix64; only used to draw test inputs.
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double range(double lo, double hi) { return lo + (hi - lo) * unit(); }

 private:
  std::uint64_t state_;
};

inline std::vector<double> random_vector(std::size_t n, std::uint64_t seed, double scale = 0.5) {
  Draw d(seed);
  std::vector<double> out(n);
  for (auto& x : out) x = d.range(-scale, scale);
  return out;
}

inline double central_difference(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline double rel_error(double a, double b, double floor) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

// Beltrami fields typed out independently of the library.
struct Beltrami {
  static double u(double x, double y) { return -std::cos(M_PI * x) * std::sin(M_PI * y); }
  static double v(double x, double y) { return std::sin(M_PI * x) * std::cos(M_PI * y); }
  static double p(double x, double y) { return -0.25 * (std::cos(2 * M_PI * x) + std::cos(2 * M_PI * y)); }
  static double theta(double x, double y) { return std::cos(M_PI * x) * std::cos(M_PI * y); }
};

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("bpinn-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing
