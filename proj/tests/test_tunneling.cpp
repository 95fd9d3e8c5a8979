#include <cmath>
#include <random>

#include <doctest.h>

#include "qcr/constants.hpp"
#include "qcr/errors.hpp"
#include "qcr/params.hpp"
#include "qcr/tunneling.hpp"
#include "support/oracles.hpp"

using namespace qcr;

namespace {

// 40-digit arbitrary-precision references, reference device (gamma_D = 4e-4,
// T = 0.17 K, Delta = 215 ueV, R_T = 14 kohm).
constexpr double ref_dos_zero = 0.00039999996800000384;
constexpr double ref_dos_gap = 25.00750062491248594;
constexpr double ref_dos_100gap = 1.00005000375;
constexpr double ref_fermi_minus_kt = 0.73105857863000487925;
constexpr double ref_kernel_zero = 1467373.893128562;       // F(0), 1/s
constexpr double ref_kernel_photon = 4052033.146393893;     // F(+h f0), 1/s
constexpr double ref_kernel_m_photon = 349215.799841241;    // F(-h f0), 1/s
constexpr double ref_normal_limit = 3542225250.965687;      // k_B T / h, 1/s

double rel_diff(double a, double b) { return std::abs(a - b) / std::abs(b); }

TunnelKernelParams reference_kernel() {
  return kernel_params(testing::reference_device());
}

}  // namespace

TEST_CASE("broadened density of states matches arbitrary-precision values") {
  const TunnelKernelParams k = reference_kernel();
  const double d = k.gap_energy;
  CHECK(rel_diff(dynes_dos(0.0, d, k.dynes_parameter), ref_dos_zero) < 1e-12);
  CHECK(rel_diff(dynes_dos(d, d, k.dynes_parameter), ref_dos_gap) < 1e-12);
  CHECK(rel_diff(dynes_dos(100.0 * d, d, k.dynes_parameter), ref_dos_100gap) <
        1e-12);
}

TEST_CASE("density of states is even, positive, and normalizes at infinity") {
  const TunnelKernelParams k = reference_kernel();
  const double d = k.gap_energy;
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> log_u(-3.0, 1.5);
  for (int i = 0; i < 10000; ++i) {
    const double eps = d * std::pow(10.0, log_u(rng));
    const double plus = dynes_dos(eps, d, k.dynes_parameter);
    const double minus = dynes_dos(-eps, d, k.dynes_parameter);
    CHECK(plus > 0.0);
    CHECK(std::abs(plus - minus) <= 1e-13 * plus);
  }
  CHECK(std::abs(dynes_dos(1e3 * d, d, k.dynes_parameter) - 1.0) < 1e-6);
  // The broadening parameter sets the subgap floor.
  CHECK(rel_diff(dynes_dos(0.0, d, k.dynes_parameter), k.dynes_parameter) <
        1e-6);
}

TEST_CASE("occupation factor is branch-stable across the full double range") {
  const TunnelKernelParams k = reference_kernel();
  const double kt = constants::boltzmann * k.temperature;
  CHECK(fermi_occupation(0.0, k.temperature) == 0.5);
  CHECK(rel_diff(fermi_occupation(-kt, k.temperature), ref_fermi_minus_kt) <
        1e-15);
  CHECK(fermi_occupation(kt, k.temperature) +
            fermi_occupation(-kt, k.temperature) ==
        doctest::Approx(1.0).epsilon(1e-15));
  // Extreme arguments must neither overflow nor produce NaN.
  CHECK(fermi_occupation(-700.0 * kt, k.temperature) == 1.0);
  const double tiny = fermi_occupation(700.0 * kt, k.temperature);
  CHECK(tiny > 0.0);
  CHECK(tiny < 1e-300);
  CHECK(fermi_occupation(1e6 * kt, k.temperature) == 0.0);
  CHECK(std::isfinite(fermi_occupation(1e6 * kt, k.temperature)));
}

TEST_CASE("rate kernel matches arbitrary-precision references") {
  const TunnelKernelParams k = reference_kernel();
  const double photon =
      constants::planck * testing::reference_device().mode_frequency;
  const KernelRate zero = forward_rate(0.0, k);
  const KernelRate up = forward_rate(photon, k);
  const KernelRate down = forward_rate(-photon, k);
  CHECK(rel_diff(zero.rate, ref_kernel_zero) < 1e-8);
  CHECK(rel_diff(up.rate, ref_kernel_photon) < 1e-8);
  CHECK(rel_diff(down.rate, ref_kernel_m_photon) < 1e-8);
  CHECK(zero.rel_error <= 1e-8);
  CHECK(up.rel_error <= 1e-8);
  CHECK(down.rel_error <= 1e-8);
}

TEST_CASE("rate kernel agrees with the graded-grid trapezoid evaluation") {
  const TunnelKernelParams k = reference_kernel();
  const double d = k.gap_energy;
  const double photon =
      constants::planck * testing::reference_device().mode_frequency;
  for (double energy : {0.0, photon, -photon, 0.5 * d, d, -1.3 * d, 2.7 * d}) {
    CAPTURE(energy / d);
    const double adaptive = forward_rate(energy, k).rate;
    const double trapezoid = testing::trapezoid_kernel_rate(energy, k);
    CHECK(rel_diff(adaptive, trapezoid) < 1e-6);
  }
}

TEST_CASE("rate kernel obeys detailed balance over [0, 3*Delta]") {
  const TunnelKernelParams k = reference_kernel();
  const double kt = constants::boltzmann * k.temperature;
  for (int i = 0; i < 50; ++i) {
    const double energy = 3.0 * k.gap_energy * i / 49.0;
    CAPTURE(energy / k.gap_energy);
    const double forward = forward_rate(energy, k).rate;
    const double backward = forward_rate(-energy, k).rate;
    const double expected = std::exp(-energy / kt) * forward;
    CHECK(std::abs(backward - expected) <= 1e-6 * expected);
  }
}

TEST_CASE("rate kernel is monotone nondecreasing in its argument") {
  const TunnelKernelParams k = reference_kernel();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 100; ++i) {
    double a = u(rng) * k.gap_energy;
    double b = u(rng) * k.gap_energy;
    if (a > b) std::swap(a, b);
    const double fa = forward_rate(a, k).rate;
    const double fb = forward_rate(b, k).rate;
    CHECK(fa <= fb * (1.0 + 1e-9));
  }
}

TEST_CASE("normal-metal limit reproduces the analytic thermal rate") {
  // With the density of states forced to 1, F(0) = k_B T / h exactly.
  const TunnelKernelParams k = reference_kernel();
  const auto flat_dos = [](double) { return 1.0; };
  const KernelRate r = forward_rate(0.0, k, flat_dos);
  const double analytic =
      constants::boltzmann * k.temperature / constants::planck;
  CHECK(rel_diff(r.rate, analytic) < 1e-9);
  CHECK(rel_diff(r.rate, ref_normal_limit) < 1e-9);
}

TEST_CASE("kernel argument guard rejects |E| beyond 20*Delta") {
  const TunnelKernelParams k = reference_kernel();
  CHECK_THROWS_AS(forward_rate(20.5 * k.gap_energy, k), RangeError);
  CHECK_THROWS_AS(forward_rate(-20.5 * k.gap_energy, k), RangeError);
  CHECK_NOTHROW(forward_rate(19.5 * k.gap_energy, k));
}

TEST_CASE("kernel_params mirrors the device fields") {
  const DeviceParams device = testing::reference_device();
  const TunnelKernelParams k = kernel_params(device);
  CHECK(k.gap_energy == device.gap_energy);
  CHECK(k.dynes_parameter == device.dynes_parameter);
  CHECK(k.temperature == device.electron_temperature);
  CHECK(k.tunnel_resistance == device.tunnel_resistance);
}
