#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace qcr {

// Derives a stream seed from a base seed and up to three indices using a
// splitmix64-style finalizer. Each (base, i, j, k) tuple maps to a distinct,
// well-mixed seed, so per-trace generators are independent and reproducible
// regardless of evaluation order.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t i = 0,
                              std::uint64_t j = 0,
                              std::uint64_t k = 0) noexcept {
  auto mix = [](std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  };
  std::uint64_t s = mix(base);
  s = mix(s ^ mix(i + 0x632be59bd9b4e019ull));
  s = mix(s ^ mix(j + 0x9e6c63d0876a9a35ull));
  s = mix(s ^ mix(k + 0xc2b2ae3d27d4eb4full));
  return s;
}

// Standard-normal sampler with a fully specified algorithm. The C++ standard
// does not pin down std::normal_distribution, so identical seeds can yield
// different streams across standard libraries; Box-Muller on top of
// mt19937_64 gives bit-identical traces everywhere.
class GaussianSampler {
 public:
  explicit GaussianSampler(std::uint64_t seed) : engine_(seed) {}

  // One standard-normal draw. Generates pairs and caches the spare.
  double operator()() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // Uniforms in (0,1] and [0,1) from the top 53 bits of the engine output.
    double u1 = uniform53();
    while (u1 == 0.0) u1 = uniform53();  // log(0) guard
    const double u2 = uniform53();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  double uniform53() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace qcr
