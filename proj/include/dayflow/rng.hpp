#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace dayflow {

// Deterministic random source. The raw stream is std::mt19937_64, whose
// output sequence is fixed by the standard, and every transform below is
// implemented here rather than taken from <random> distributions (which are
// implementation-defined). Identical seeds therefore reproduce identical
// streams across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform double in [0, 1).
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform double in (0, 1]; used where log() must not see zero.
  double uniform01_open() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  // Standard normal via the basic Box-Muller transform; consumes exactly two
  // raw values per call.
  double normal() {
    const double u1 = uniform01_open();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  double normal(double mean, double stddev) {
    return mean + stddev * normal();
  }

  // Log-normal parameterized by its median and the dispersion (sigma) of the
  // underlying normal.
  double lognormal_median(double median, double dispersion) {
    return std::exp(std::log(median) + dispersion * normal());
  }

  // Uniform integer in [0, n).
  std::int64_t uniform_int(std::int64_t n) {
    const auto v = static_cast<std::int64_t>(uniform01() * static_cast<double>(n));
    return v >= n ? n - 1 : v;
  }

  // Normal sample rounded and clamped into [lo, hi].
  std::int64_t clamped_normal_int(double mean, double stddev, std::int64_t lo,
                                  std::int64_t hi) {
    const auto v = static_cast<std::int64_t>(std::llround(normal(mean, stddev)));
    return v < lo ? lo : (v > hi ? hi : v);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dayflow
