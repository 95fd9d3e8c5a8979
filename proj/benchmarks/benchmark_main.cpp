// Microbenchmarks for the hot paths: single kernel evaluations, full
// transition-rate points, tabulated curves, pulse evolution and the
// extraction fit. Run ./qcr_benchmarks --benchmark_min_time=0.5 for
// tighter statistics.

#include <cmath>
#include <vector>

#include <benchmark/benchmark.h>

#include "qcr/constants.hpp"
#include "qcr/extraction.hpp"
#include "qcr/params.hpp"
#include "qcr/pulse.hpp"
#include "qcr/rates.hpp"
#include "qcr/tunneling.hpp"

namespace {

qcr::DeviceParams reference_device() {
  qcr::DeviceParams d;
  d.tunnel_resistance = 14.0e3;
  d.electron_temperature = 0.17;
  d.dynes_parameter = 4.0e-4;
  d.resonator_impedance = 35.0;
  d.coupling_capacitance = 840.0e-15;
  d.junction_capacitance = 5.0e-15;
  d.mode_frequency = 8.683e9;
  d.gap_energy = 215.0e-6 * qcr::constants::elementary_charge;
  return d;
}

double plateau_voltage(const qcr::DeviceParams& d, double fraction) {
  return fraction * 2.0 * d.gap_energy / qcr::constants::elementary_charge;
}

std::vector<double> bias_grid(const qcr::DeviceParams& d, std::size_t n) {
  std::vector<double> grid;
  grid.reserve(n);
  const double v_max = plateau_voltage(d, 1.2);
  for (std::size_t i = 0; i < n; ++i) {
    grid.push_back(v_max * static_cast<double>(i) /
                   static_cast<double>(n - 1));
  }
  return grid;
}

void BM_DynesDos(benchmark::State& state) {
  const qcr::DeviceParams d = reference_device();
  double eps = 0.3 * d.gap_energy;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        qcr::dynes_dos(eps, d.gap_energy, d.dynes_parameter));
    eps = -eps;  // alternate branches
  }
}
BENCHMARK(BM_DynesDos);

void BM_ForwardRateOperating(benchmark::State& state) {
  const qcr::DeviceParams d = reference_device();
  const qcr::TunnelKernelParams k = qcr::kernel_params(d);
  const qcr::DerivedParams derived = qcr::derive(d);
  // Dominant term of the absorption rate at the working point.
  const double energy = 0.5 * qcr::constants::elementary_charge *
                            plateau_voltage(d, 0.8) +
                        derived.photon_energy;
  for (auto _ : state) {
    benchmark::DoNotOptimize(qcr::forward_rate(energy, k));
  }
}
BENCHMARK(BM_ForwardRateOperating);

void BM_ForwardRateDeepTail(benchmark::State& state) {
  const qcr::DeviceParams d = reference_device();
  const qcr::TunnelKernelParams k = qcr::kernel_params(d);
  // Thermally suppressed tail: the hardest kernel evaluation the rate
  // formulas request.
  const double energy = -2.0 * d.gap_energy;
  for (auto _ : state) {
    benchmark::DoNotOptimize(qcr::forward_rate(energy, k));
  }
}
BENCHMARK(BM_ForwardRateDeepTail);

void BM_TransitionRatesOperating(benchmark::State& state) {
  const qcr::DeviceParams d = reference_device();
  const qcr::TunnelKernelParams k = qcr::kernel_params(d);
  const qcr::DerivedParams derived = qcr::derive(d);
  const double v = plateau_voltage(d, 0.8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(qcr::transition_rates(v, derived, k));
  }
}
BENCHMARK(BM_TransitionRatesOperating);

void BM_RateCurve(benchmark::State& state) {
  const qcr::DeviceParams d = reference_device();
  const std::vector<double> grid = bias_grid(d, 21);
  const int jobs = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(qcr::rate_curve(grid, d, jobs));
  }
}
BENCHMARK(BM_RateCurve)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_EvolveAmplitude(benchmark::State& state) {
  const qcr::DeviceParams d = reference_device();
  const qcr::RateCurve curve = qcr::rate_curve(bias_grid(d, 61), d, 4);
  const qcr::DampingInterpolator gamma(curve);
  const double ns = qcr::constants::nanosecond;

  qcr::Timeline tl;
  tl.drive_end = 0.0;
  tl.probe_before = 20.0 * ns;
  tl.pulse.plateau_voltage = plateau_voltage(d, 0.8);
  tl.pulse.start_time = 30.0 * ns;
  tl.pulse.width = 12.0 * ns;
  tl.pulse.rise_time = 1.25 * ns;
  tl.pulse.fall_time = 1.25 * ns;
  tl.probe_after = 70.0 * ns;
  tl.end_time = 75.0 * ns;

  const qcr::DampingModel model = [&](double v) { return gamma(v); };
  const double tau_c = 2.5 * ns;
  for (auto _ : state) {
    benchmark::DoNotOptimize(qcr::evolve_amplitude(tl, model, tau_c));
  }
}
BENCHMARK(BM_EvolveAmplitude)->Unit(benchmark::kMillisecond);

void BM_FlatRegionFit(benchmark::State& state) {
  // Synthetic width sweep: 2 ns flat prefix, then a clean exponential tail.
  std::vector<qcr::SweepPoint> points;
  for (int i = 0; i < 12; ++i) {
    qcr::SweepPoint p;
    p.tau_ns = 4.0 + 2.0 * i;
    p.log_ratio = -0.02 - 0.05 * std::max(0.0, p.tau_ns - 8.0);
    p.sigma_y = 1e-3;
    points.push_back(p);
  }
  for (auto _ : state) {
    const std::size_t k = qcr::detect_flat_region(points);
    benchmark::DoNotOptimize(qcr::fit_gamma_qcr(points, k));
  }
}
BENCHMARK(BM_FlatRegionFit);

}  // namespace

BENCHMARK_MAIN();
