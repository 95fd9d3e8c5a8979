#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include <doctest.h>

#include "qcr/constants.hpp"
#include "qcr/errors.hpp"
#include "qcr/params.hpp"
#include "qcr/pulse.hpp"
#include "qcr/quadrature.hpp"
#include "support/oracles.hpp"

using namespace qcr;

namespace {

constexpr double ns = constants::nanosecond;

BiasPulse edged_pulse(double plateau = 3.44e-4, double width_ns = 12.0,
                      double edge_ns = 1.25, double start_ns = 30.0) {
  BiasPulse pulse;
  pulse.plateau_voltage = plateau;
  pulse.width = width_ns * ns;
  pulse.rise_time = edge_ns * ns;
  pulse.fall_time = edge_ns * ns;
  pulse.start_time = start_ns * ns;
  return pulse;
}

Timeline basic_timeline(const BiasPulse& pulse) {
  Timeline timeline;
  timeline.drive_end = 0.0;
  timeline.probe_before = 20.0 * ns;
  timeline.pulse = pulse;
  timeline.probe_after = 70.0 * ns;
  timeline.end_time = 75.0 * ns;
  timeline.environment.line_damping = 1.2e7;
  timeline.environment.excess_fraction = 0.10;
  return timeline;
}

}  // namespace

TEST_CASE("pulse voltage follows the sine-squared edge profile") {
  const BiasPulse pulse = edged_pulse();
  const double vp = pulse.plateau_voltage;
  const double t0 = pulse.start_time;
  const double rise = pulse.rise_time;
  const double fall = pulse.fall_time;
  const double t1 = pulse.end_time();

  CHECK(pulse_voltage(t0 - 1.0 * ns, pulse) == 0.0);
  CHECK(pulse_voltage(t0, pulse) == 0.0);
  CHECK(pulse_voltage(t0 + 0.5 * rise, pulse) ==
        doctest::Approx(0.5 * vp).epsilon(1e-15));
  CHECK(pulse_voltage(t0 + rise, pulse) ==
        doctest::Approx(vp).epsilon(1e-15));
  CHECK(pulse_voltage(t0 + 0.5 * pulse.width, pulse) == vp);
  CHECK(pulse_voltage(t1 - 0.5 * fall, pulse) ==
        doctest::Approx(0.5 * vp).epsilon(1e-15));
  CHECK(pulse_voltage(t1, pulse) == doctest::Approx(0.0));
  CHECK(pulse_voltage(t1 + 0.1 * ns, pulse) == 0.0);
  // Quarter of the way into the rise: sin^2(pi/8).
  const double quarter = std::pow(std::sin(std::numbers::pi / 8.0), 2);
  CHECK(pulse_voltage(t0 + 0.25 * rise, pulse) ==
        doctest::Approx(vp * quarter).epsilon(1e-14));
}

TEST_CASE("rectangular pulse switches exactly at its boundaries") {
  BiasPulse pulse = edged_pulse();
  pulse.rise_time = 0.0;
  pulse.fall_time = 0.0;
  const double vp = pulse.plateau_voltage;
  CHECK(pulse_voltage(pulse.start_time, pulse) == vp);
  CHECK(pulse_voltage(pulse.start_time + 0.5 * pulse.width, pulse) == vp);
  CHECK(pulse_voltage(std::nextafter(pulse.start_time, 0.0), pulse) == 0.0);
  // The supported interval is closed: with zero fall time the pulse still
  // reads the plateau at its exact end, and drops immediately past it.
  CHECK(pulse_voltage(pulse.end_time(), pulse) == vp);
  CHECK(pulse_voltage(std::nextafter(pulse.end_time(), 1.0), pulse) == 0.0);
}

TEST_CASE("pulse validation rejects inconsistent shapes") {
  BiasPulse pulse = edged_pulse();
  SUBCASE("edges wider than the pulse") {
    pulse.width = 2.0 * ns;  // rise + fall = 2.5 ns
    CHECK_THROWS_WITH_AS(validate(pulse),
                         doctest::Contains("edges are included in the width"),
                         ConfigError);
  }
  SUBCASE("negative rise time") {
    pulse.rise_time = -1.0 * ns;
    CHECK_THROWS_AS(validate(pulse), ConfigError);
  }
  SUBCASE("non-finite plateau") {
    pulse.plateau_voltage = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(validate(pulse), ConfigError);
  }
}

TEST_CASE("sampled distortion filter") {
  SUBCASE("zero time constant is the identity") {
    const std::vector<double> x = {0.0, 1.0, 0.5, -2.0};
    CHECK(distort(x, 1e-9, 0.0) == x);
  }
  SUBCASE("constant input is a fixed point") {
    const std::vector<double> x(16, 3.5);
    CHECK(distort(x, 1e-9, 2.5e-9) == x);
  }
  SUBCASE("step response follows the exact exponential") {
    const double dt = 0.1e-9;
    const double tau = 2.5e-9;
    std::vector<double> x(64, 0.0);
    const std::size_t k = 8;
    for (std::size_t i = k; i < x.size(); ++i) x[i] = 1.0;
    const std::vector<double> y = distort(x, dt, tau);
    const double alpha = 1.0 - std::exp(-dt / tau);
    for (std::size_t n = 0; n < x.size(); ++n) {
      CAPTURE(n);
      const double expected =
          n < k ? 0.0
                : 1.0 - std::pow(1.0 - alpha, static_cast<double>(n - k + 1));
      CHECK(y[n] == doctest::Approx(expected).epsilon(1e-12));
    }
  }
  SUBCASE("invalid arguments raise NumericsError") {
    CHECK_THROWS_AS(distort({1.0}, 0.0, 1e-9), NumericsError);
    CHECK_THROWS_AS(distort({1.0}, -1e-9, 1e-9), NumericsError);
    CHECK_THROWS_AS(distort({1.0}, 1e-9, -1e-9), NumericsError);
  }
}

TEST_CASE("continuous distortion of a rectangular pulse is analytic") {
  BiasPulse pulse = edged_pulse();
  pulse.rise_time = 0.0;
  pulse.fall_time = 0.0;
  const double tau = 2.5 * ns;
  const double vp = pulse.plateau_voltage;
  const double t0 = pulse.start_time;
  const double t1 = pulse.end_time();

  CHECK(distorted_voltage(t0 - 1.0 * ns, pulse, tau) == doctest::Approx(0.0));
  for (double dt_ns : {0.5, 1.0, 2.5, 5.0, 11.0}) {
    CAPTURE(dt_ns);
    const double t = t0 + dt_ns * ns;
    const double expected = vp * (1.0 - std::exp(-(t - t0) / tau));
    CHECK(distorted_voltage(t, pulse, tau) ==
          doctest::Approx(expected).epsilon(1e-9));
  }
  for (double dt_ns : {0.5, 2.0, 6.0}) {
    CAPTURE(dt_ns);
    const double t = t1 + dt_ns * ns;
    const double settled = vp * (1.0 - std::exp(-pulse.width / tau));
    const double expected = settled * std::exp(-(t - t1) / tau);
    CHECK(distorted_voltage(t, pulse, tau) ==
          doctest::Approx(expected).epsilon(1e-9));
  }
  SUBCASE("zero time constant reproduces the undistorted pulse") {
    for (double t_ns : {29.0, 30.5, 36.0, 42.5, 50.0}) {
      const double t = t_ns * ns;
      CHECK(distorted_voltage(t, pulse, 0.0) == pulse_voltage(t, pulse));
    }
  }
}

TEST_CASE("continuous and sampled distortion agree on a dense grid") {
  const BiasPulse pulse = edged_pulse();
  const double tau = 2.5 * ns;
  const double dt = 1e-3 * ns;
  const double lo = pulse.start_time - 2.0 * ns;
  std::vector<double> samples;
  for (int i = 0; i <= 20000; ++i) {
    samples.push_back(pulse_voltage(lo + i * dt, pulse));
  }
  const std::vector<double> filtered = distort(samples, dt, tau);
  const double vp = pulse.plateau_voltage;
  for (int i = 2000; i <= 20000; i += 1500) {
    CAPTURE(i);
    const double exact = distorted_voltage(lo + i * dt, pulse, tau);
    CHECK(std::abs(filtered[i] - exact) < 2e-3 * vp);
  }
}

TEST_CASE("timeline validation names the violated ordering") {
  Timeline timeline = basic_timeline(edged_pulse());
  SUBCASE("valid baseline") { CHECK_NOTHROW(validate(timeline)); }
  SUBCASE("probe before the drive end") {
    timeline.probe_before = -1.0 * ns;
    CHECK_THROWS_AS(validate(timeline), ConfigError);
  }
  SUBCASE("pulse starts before the first probe") {
    timeline.pulse.start_time = 10.0 * ns;
    CHECK_THROWS_AS(validate(timeline), ConfigError);
  }
  SUBCASE("pulse ends after the second probe") {
    timeline.pulse.width = 45.0 * ns;
    CHECK_THROWS_AS(validate(timeline), ConfigError);
  }
  SUBCASE("pulse wider than the probe window") {
    timeline.probe_before = 29.0 * ns;
    timeline.probe_after = 43.0 * ns;
    timeline.end_time = 43.0 * ns;
    timeline.pulse.width = 14.0 * ns;  // fits between probes? 43-29=14, not <
    CHECK_THROWS_AS(validate(timeline), ConfigError);
  }
  SUBCASE("end before the second probe") {
    timeline.end_time = 69.0 * ns;
    CHECK_THROWS_AS(validate(timeline), ConfigError);
  }
}

TEST_CASE("timeline hash is sensitive to every field") {
  const Timeline base = basic_timeline(edged_pulse());
  const std::uint64_t h0 = timeline_hash(base);
  CHECK(h0 == timeline_hash(base));

  int changed = 0;
  auto expect_differs = [&](Timeline t) {
    CHECK(timeline_hash(t) != h0);
    ++changed;
  };
  Timeline t = base;
  t.drive_end += 1e-12;
  expect_differs(t);
  t = base;
  t.probe_before += 1e-12;
  expect_differs(t);
  t = base;
  t.probe_after += 1e-12;
  expect_differs(t);
  t = base;
  t.end_time += 1e-12;
  expect_differs(t);
  t = base;
  t.pulse.plateau_voltage *= 1.0 + 1e-12;
  expect_differs(t);
  t = base;
  t.pulse.width += 1e-12;
  expect_differs(t);
  t = base;
  t.pulse.rise_time += 1e-12;
  expect_differs(t);
  t = base;
  t.pulse.fall_time += 1e-12;
  expect_differs(t);
  t = base;
  t.pulse.start_time += 1e-12;
  expect_differs(t);
  t = base;
  t.environment.line_damping += 1.0;
  expect_differs(t);
  t = base;
  t.environment.excess_fraction += 1e-9;
  expect_differs(t);
  t = base;
  t.environment.off_state_damping += 1.0;
  expect_differs(t);
  CHECK(changed == 12);
}

TEST_CASE("rectangular evolution matches the piecewise-exponential solution") {
  BiasPulse pulse = edged_pulse();
  pulse.rise_time = 0.0;
  pulse.fall_time = 0.0;
  Timeline timeline = basic_timeline(pulse);
  const double vp = pulse.plateau_voltage;
  const double gamma_on = 2.4e8;
  const double gamma_off = 1.1e5;
  const DampingModel model = testing::step_damping_model(vp, gamma_off, gamma_on);
  const double bg = timeline.environment.background();

  const AmplitudeTrajectory traj = evolve_amplitude(timeline, model);
  const std::vector<double> edges = {0.0, pulse.start_time, pulse.end_time(),
                                     timeline.end_time};
  const std::vector<double> rates = {bg + gamma_off, bg + gamma_on,
                                     bg + gamma_off};
  double worst = 0.0;
  for (int i = 0; i <= 150; ++i) {
    // i/150 can round a hair past the final node; keep queries in-window.
    const double t = std::min(timeline.end_time * i / 150.0, traj.times.back());
    const double expected =
        testing::piecewise_exponential_amplitude(edges, rates, t);
    worst = std::max(worst,
                     std::abs(traj.amplitude_at(t) - expected) / expected);
  }
  CHECK(worst < 1e-9);
  CHECK(traj.amplitude_at(0.0) == 1.0);
}

TEST_CASE("random rectangular schedules agree with the closed form") {
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int schedule = 0; schedule < 50; ++schedule) {
    CAPTURE(schedule);
    const double t_b = (5.0 + 10.0 * u01(rng)) * ns;
    const double start = t_b + (1.0 + 9.0 * u01(rng)) * ns;
    const double tau = (1.0 + 24.0 * u01(rng)) * ns;
    const double t_a = start + tau + (1.0 + 14.0 * u01(rng)) * ns;
    const double end = t_a + (0.5 + 9.5 * u01(rng)) * ns;
    const double vp = 1e-5 + 4.9e-4 * u01(rng);
    const double gamma_on = std::pow(10.0, 7.0 + 1.8 * u01(rng));
    const double gamma_off = 2e5 * u01(rng);
    const double line = std::pow(10.0, 6.0 + 1.3 * u01(rng));

    Timeline timeline;
    timeline.drive_end = 0.0;
    timeline.probe_before = t_b;
    timeline.pulse.plateau_voltage = vp;
    timeline.pulse.start_time = start;
    timeline.pulse.width = tau;
    timeline.probe_after = t_a;
    timeline.end_time = end;
    timeline.environment.line_damping = line;
    timeline.environment.excess_fraction = 0.10;

    const DampingModel model =
        testing::step_damping_model(vp, gamma_off, gamma_on);
    const AmplitudeTrajectory traj = evolve_amplitude(timeline, model);

    const double bg = timeline.environment.background();
    const std::vector<double> edges = {0.0, start, start + tau, end};
    const std::vector<double> rates = {bg + gamma_off, bg + gamma_on,
                                       bg + gamma_off};
    double worst = 0.0;
    for (int i = 0; i <= 24; ++i) {
      const double t = std::min(end * i / 24.0, traj.times.back());
      const double expected =
          testing::piecewise_exponential_amplitude(edges, rates, t);
      worst = std::max(worst,
                       std::abs(traj.amplitude_at(t) - expected) / expected);
    }
    for (double t : {t_b, t_a}) {
      const double expected =
          testing::piecewise_exponential_amplitude(edges, rates, t);
      worst = std::max(worst,
                       std::abs(traj.amplitude_at(t) - expected) / expected);
    }
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("distorted evolution matches direct integration of the damping") {
  const BiasPulse pulse = edged_pulse();
  Timeline timeline = basic_timeline(pulse);
  const double tau_c = 2.5 * ns;
  const DampingModel model =
      testing::smooth_damping_model(pulse.plateau_voltage, 1e5, 3e8);

  const AmplitudeTrajectory traj = evolve_amplitude(timeline, model, tau_c);

  auto reference_amplitude = [&](double t) {
    std::vector<double> breakpoints = {0.0};
    for (double b :
         {timeline.probe_before, pulse.start_time,
          pulse.start_time + pulse.rise_time, pulse.end_time() - pulse.fall_time,
          pulse.end_time(), timeline.probe_after}) {
      if (b < t) breakpoints.push_back(b);
    }
    breakpoints.push_back(t);
    QuadratureOptions options;
    options.rel_tol = 1e-11;
    const QuadratureResult integral = integrate_adaptive(
        [&](double s) { return total_damping(s, timeline, model, tau_c); },
        breakpoints, options);
    return std::exp(-0.5 * integral.value);
  };

  for (double t_ns : {25.0, 30.6, 33.0, 38.0, 41.3, 45.0, 60.0, 74.0}) {
    CAPTURE(t_ns);
    const double expected = reference_amplitude(t_ns * ns);
    CHECK(traj.amplitude_at(t_ns * ns) ==
          doctest::Approx(expected).epsilon(1e-7));
  }
}

TEST_CASE("evolution is consistent with the closed-form log-ratio model") {
  const BiasPulse pulse = edged_pulse();
  Timeline timeline = basic_timeline(pulse);
  const DampingModel model =
      testing::smooth_damping_model(pulse.plateau_voltage, 1.1e5, 2.7e8);

  const AmplitudeTrajectory traj = evolve_amplitude(timeline, model, 0.0);
  AnalysisRates rates;
  rates.qcr_on = model(pulse.plateau_voltage);
  rates.edge_effective = edge_average_damping(pulse, model);
  rates.qcr_off = model(0.0);
  const double predicted = predicted_log_ratio(timeline, rates);
  const double simulated =
      traj.log_amplitude_ratio(timeline.probe_after, timeline.probe_before);
  CHECK(simulated == doctest::Approx(predicted).epsilon(1e-8));
}

TEST_CASE("edge-averaged damping respects analytic bounds") {
  const BiasPulse pulse = edged_pulse();
  const double vp = pulse.plateau_voltage;
  SUBCASE("linear model averages to the midpoint") {
    const double low = 2e5;
    const double high = 3e8;
    const DampingModel linear = [=](double v) {
      return low + (high - low) * std::abs(v) / vp;
    };
    // Time average of sin^2 over one edge is exactly 1/2.
    CHECK(edge_average_damping(pulse, linear) ==
          doctest::Approx(0.5 * (low + high)).epsilon(1e-9));
  }
  SUBCASE("bounded by the model extremes") {
    const DampingModel model = testing::smooth_damping_model(vp, 1e5, 3e8);
    const double avg = edge_average_damping(pulse, model);
    CHECK(avg > 1e5);
    CHECK(avg < 3e8);
  }
  SUBCASE("rectangular pulse returns the off-state value") {
    BiasPulse rect = pulse;
    rect.rise_time = 0.0;
    rect.fall_time = 0.0;
    const DampingModel model = testing::smooth_damping_model(vp, 1e5, 3e8);
    CHECK(edge_average_damping(rect, model) == model(0.0));
  }
}

TEST_CASE("trajectory queries are exact at nodes and guarded outside") {
  BiasPulse pulse = edged_pulse();
  Timeline timeline = basic_timeline(pulse);
  const DampingModel model =
      testing::smooth_damping_model(pulse.plateau_voltage, 1e5, 2e8);
  const AmplitudeTrajectory traj = evolve_amplitude(timeline, model);
  REQUIRE(traj.times.size() == traj.amplitudes.size());
  REQUIRE(traj.times.size() == traj.damping_before.size());
  REQUIRE(traj.times.size() == traj.damping_after.size());
  for (std::size_t i = 0; i < traj.times.size(); i += 97) {
    CHECK(traj.amplitude_at(traj.times[i]) == traj.amplitudes[i]);
  }
  CHECK_THROWS_AS(traj.amplitude_at(-1.0 * ns), RangeError);
  CHECK_THROWS_AS(traj.amplitude_at(timeline.end_time + 1.0 * ns), RangeError);
  CHECK(traj.log_amplitude_ratio(timeline.probe_after, timeline.probe_before) ==
        doctest::Approx(std::log(traj.amplitude_at(timeline.probe_after) /
                                 traj.amplitude_at(timeline.probe_before)))
            .epsilon(1e-15));
}

TEST_CASE("evolution rejects invalid timelines") {
  Timeline timeline = basic_timeline(edged_pulse());
  timeline.probe_after = 30.0 * ns;  // inside the pulse
  const DampingModel model = [](double) { return 1e6; };
  CHECK_THROWS_AS(evolve_amplitude(timeline, model), ConfigError);
}
