#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace nfce {

// Deterministic RNG stream. mt19937_64 gives a standard-pinned bit sequence;
// the uniform/normal transforms below are spelled out here so draws do not
// depend on implementation-defined std distributions.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : gen_(seed) {}

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Standard normal via Box-Muller; second draw of each pair is cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    double u2 = uniform01();
    // Guard against log(0).
    while (u1 <= 0.0) u1 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Circular complex Gaussian with E|x|^2 = 1.
  std::complex<double> complex_normal() {
    const double re = normal();
    const double im = normal();
    return {re * M_SQRT1_2, im * M_SQRT1_2};
  }

  // Unit-modulus value with phase uniform on [0, 2*pi).
  std::complex<double> unit_phase() {
    return std::polar(1.0, uniform(0.0, 2.0 * M_PI));
  }

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// splitmix64 step, used to mix substream labels into a master seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives an independent substream seed from (master, a, b, c). Streams for
// distinct labels are unrelated, which keeps concurrent trials
// schedule-independent.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t x = splitmix64(master);
  x = splitmix64(x ^ (a * 0x9e3779b97f4a7c15ULL));
  x = splitmix64(x ^ (b * 0xc2b2ae3d27d4eb4fULL));
  x = splitmix64(x ^ (c * 0x165667b19e3779f9ULL));
  return x;
}

}  // namespace nfce
