#include "qcr/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "qcr/errors.hpp"
#include "qcr/hashing.hpp"
#include "qcr/quadrature.hpp"
#include "text_format.hpp"

namespace qcr {

namespace {

// Pulse branches. Segment-wise integration evaluates the branch that owns the
// segment instead of calling pulse_voltage directly, so a voltage
// discontinuity (rectangular pulse) is always seen from the correct side at
// segment boundaries.
enum class Branch { off, rise, plateau, fall };

Branch classify(double t, const BiasPulse& p) {
  const double local = t - p.start_time;
  if (local < 0.0 || local > p.width) return Branch::off;
  if (p.rise_time > 0.0 && local < p.rise_time) return Branch::rise;
  if (local < p.width - p.fall_time) return Branch::plateau;
  if (p.fall_time > 0.0) return Branch::fall;
  return Branch::plateau;
}

double branch_voltage(Branch branch, double t, const BiasPulse& p) {
  switch (branch) {
    case Branch::off:
      return 0.0;
    case Branch::rise: {
      const double s =
          std::sin(std::numbers::pi * (t - p.start_time) / (2.0 * p.rise_time));
      return p.plateau_voltage * s * s;
    }
    case Branch::plateau:
      return p.plateau_voltage;
    case Branch::fall: {
      const double s =
          std::sin(std::numbers::pi * (p.end_time() - t) / (2.0 * p.fall_time));
      return p.plateau_voltage * s * s;
    }
  }
  return 0.0;
}

}  // namespace

void validate(const BiasPulse& pulse) {
  if (!std::isfinite(pulse.plateau_voltage)) {
    throw ConfigError("pulse: non-finite plateau voltage");
  }
  if (!(pulse.rise_time >= 0.0) || !(pulse.fall_time >= 0.0) ||
      !(pulse.width >= 0.0)) {
    throw ConfigError("pulse: durations must be nonnegative");
  }
  if (!(pulse.width >= pulse.rise_time + pulse.fall_time)) {
    throw ConfigError(
        "pulse: width must cover rise + fall (edges are included in the "
        "width)");
  }
}

double pulse_voltage(double t, const BiasPulse& pulse) {
  return branch_voltage(classify(t, pulse), t, pulse);
}

std::vector<double> distort(const std::vector<double>& samples, double dt,
                            double tau_c) {
  if (!(dt > 0.0)) {
    throw NumericsError("distort: sampling period must be positive");
  }
  if (!(tau_c >= 0.0)) {
    throw NumericsError("distort: tau_c must be nonnegative");
  }
  if (tau_c == 0.0 || samples.empty()) {
    return samples;
  }
  const double alpha = 1.0 - std::exp(-dt / tau_c);
  std::vector<double> out(samples.size());
  double state = samples.front();  // primed with the first sample
  for (std::size_t i = 0; i < samples.size(); ++i) {
    state += alpha * (samples[i] - state);
    out[i] = state;
  }
  return out;
}

double distorted_voltage(double t, const BiasPulse& pulse, double tau_c) {
  if (tau_c <= 0.0) {
    return pulse_voltage(t, pulse);
  }
  if (t <= pulse.start_time) {
    return 0.0;  // filter input is identically zero until the pulse starts
  }
  // Exact single-pole response: V_d(t) = (1/tau_c) Int_{t0}^{t} V(s)
  // exp(-(t-s)/tau_c) ds, with the exponentially aged history truncated once
  // it is below double precision.
  const double lo = std::max(pulse.start_time, t - 50.0 * tau_c);
  std::vector<double> breakpoints = {lo, t};
  for (double edge : {pulse.start_time + pulse.rise_time,
                      pulse.end_time() - pulse.fall_time, pulse.end_time()}) {
    if (edge > lo && edge < t) breakpoints.push_back(edge);
  }
  auto integrand = [&](double s) {
    return pulse_voltage(s, pulse) * std::exp(-(t - s) / tau_c);
  };
  QuadratureOptions options;
  options.rel_tol = 1e-10;
  options.abs_tol = 1e-13 * std::abs(pulse.plateau_voltage) * tau_c;
  const QuadratureResult integral =
      integrate_adaptive(integrand, std::move(breakpoints), options);
  return integral.value / tau_c;
}

void validate(const Timeline& timeline) {
  validate(timeline.pulse);
  validate(timeline.environment);
  if (!(timeline.drive_end <= timeline.probe_before)) {
    throw ConfigError("timeline: t_b must not precede drive_end");
  }
  if (!(timeline.probe_before < timeline.pulse.start_time)) {
    throw ConfigError("timeline: t_b must precede the pulse start");
  }
  if (!(timeline.pulse.end_time() < timeline.probe_after)) {
    throw ConfigError("timeline: the pulse must end before t_a");
  }
  if (!(timeline.pulse.width < timeline.probe_after - timeline.probe_before)) {
    throw ConfigError("timeline: pulse width must be below t_a - t_b");
  }
  if (!(timeline.end_time >= timeline.probe_after)) {
    throw ConfigError("timeline: end_time must not precede t_a");
  }
}

std::uint64_t timeline_hash(const Timeline& tl) {
  std::string canon;
  canon.reserve(220);
  const double fields[] = {tl.drive_end,
                           tl.pulse.plateau_voltage,
                           tl.pulse.width,
                           tl.pulse.rise_time,
                           tl.pulse.fall_time,
                           tl.pulse.start_time,
                           tl.probe_before,
                           tl.probe_after,
                           tl.end_time,
                           tl.environment.line_damping,
                           tl.environment.excess_fraction,
                           tl.environment.off_state_damping};
  for (double f : fields) {
    canon += detail::format_double(f);
    canon += ';';
  }
  return fnv1a64(canon);
}

double total_damping(double t, const Timeline& timeline,
                     const DampingModel& model, double tau_c) {
  return timeline.environment.background() +
         model(distorted_voltage(t, timeline.pulse, tau_c));
}

double AmplitudeTrajectory::amplitude_at(double t) const {
  if (times.size() < 2) {
    throw NumericsError("trajectory: too few nodes");
  }
  if (!(t >= times.front() && t <= times.back())) {
    throw RangeError("trajectory: query outside the simulated window");
  }
  auto it = std::upper_bound(times.begin(), times.end(), t);
  std::size_t i = static_cast<std::size_t>(
      std::max<std::ptrdiff_t>(0, (it - times.begin()) - 1));
  i = std::min(i, times.size() - 2);
  if (t == times[i]) return amplitudes[i];
  if (t == times[i + 1]) return amplitudes[i + 1];

  // Cubic Hermite with the one-sided nodal derivatives A' = -gamma A / 2
  // seen from inside this interval; accurate to far below the integrator
  // tolerance for the step sizes used.
  const double h = times[i + 1] - times[i];
  const double u = (t - times[i]) / h;
  const double u2 = u * u;
  const double u3 = u2 * u;
  const double m0 = -0.5 * damping_after[i] * amplitudes[i];
  const double m1 = -0.5 * damping_before[i + 1] * amplitudes[i + 1];
  return (2.0 * u3 - 3.0 * u2 + 1.0) * amplitudes[i] +
         (u3 - 2.0 * u2 + u) * h * m0 +
         (-2.0 * u3 + 3.0 * u2) * amplitudes[i + 1] + (u3 - u2) * h * m1;
}

double AmplitudeTrajectory::log_amplitude_ratio(double t_num,
                                                double t_den) const {
  const double num = amplitude_at(t_num);
  const double den = amplitude_at(t_den);
  if (!(num > 0.0) || !(den > 0.0)) {
    throw NumericsError("trajectory: non-positive amplitude in log ratio");
  }
  return std::log(num / den);
}

AmplitudeTrajectory evolve_amplitude(const Timeline& timeline,
                                     const DampingModel& model, double tau_c) {
  validate(timeline);
  if (!(tau_c >= 0.0)) {
    throw NumericsError("evolve_amplitude: tau_c must be nonnegative");
  }
  const BiasPulse& pulse = timeline.pulse;
  const double background = timeline.environment.background();

  // Conservative bound on the total damping, used only to size the step.
  double model_max = 0.0;
  {
    const int probes = 512;
    const double v_top = pulse.plateau_voltage;
    for (int i = 0; i <= probes; ++i) {
      const double v = v_top * static_cast<double>(i) / probes;
      model_max = std::max(model_max, model(v));
      if (v_top == 0.0) break;
    }
  }
  const double gamma_max = background + model_max;

  double h_target = std::numeric_limits<double>::infinity();
  if (pulse.rise_time > 0.0) h_target = std::min(h_target, pulse.rise_time);
  if (pulse.fall_time > 0.0) h_target = std::min(h_target, pulse.fall_time);
  if (gamma_max > 0.0) h_target = std::min(h_target, 1.0 / gamma_max);
  if (tau_c > 0.0) h_target = std::min(h_target, tau_c);
  h_target /= 64.0;

  // Segment boundaries: every pulse discontinuity or kink plus the probe
  // times, so integration steps never straddle a non-smooth point and the
  // probes land exactly on nodes.
  std::vector<double> edges = {timeline.drive_end,
                               timeline.probe_before,
                               pulse.start_time,
                               pulse.start_time + pulse.rise_time,
                               pulse.end_time() - pulse.fall_time,
                               pulse.end_time(),
                               timeline.probe_after,
                               timeline.end_time};
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  edges.erase(std::remove_if(edges.begin(), edges.end(),
                             [&](double t) {
                               return t < timeline.drive_end ||
                                      t > timeline.end_time;
                             }),
              edges.end());

  AmplitudeTrajectory traj;
  const auto reserve_hint = static_cast<std::size_t>(
      std::min(1.0e6, (timeline.end_time - timeline.drive_end) /
                              std::max(h_target, 1e-18) +
                          16.0));
  traj.times.reserve(reserve_hint);
  traj.amplitudes.reserve(reserve_hint);
  traj.damping_before.reserve(reserve_hint);
  traj.damping_after.reserve(reserve_hint);

  double amplitude = 1.0;
  double filter_state = 0.0;  // distorted voltage when tau_c > 0

  auto gamma_at = [&](Branch branch, double t, double vd) {
    const double v = tau_c > 0.0 ? vd : branch_voltage(branch, t, pulse);
    return background + model(v);
  };

  // First node; the right-limit side is overwritten when the first segment
  // starts stepping.
  {
    const double g0 =
        gamma_at(classify(timeline.drive_end, pulse), timeline.drive_end,
                 filter_state);
    traj.times.push_back(timeline.drive_end);
    traj.amplitudes.push_back(amplitude);
    traj.damping_before.push_back(g0);
    traj.damping_after.push_back(g0);
  }

  std::size_t total_steps = 0;
  constexpr std::size_t max_total_steps = 20'000'000;

  for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
    const double a = edges[s];
    const double b = edges[s + 1];
    const double len = b - a;
    if (!(len > 0.0)) continue;
    const Branch branch = classify(a + 0.5 * len, pulse);

    std::size_t nsteps =
        std::isfinite(h_target)
            ? static_cast<std::size_t>(std::ceil(len / h_target))
            : 1;
    nsteps = std::max<std::size_t>(1, nsteps);
    total_steps += nsteps;
    if (total_steps > max_total_steps) {
      throw NumericsError("evolve_amplitude: step-size underflow");
    }
    const double h = len / static_cast<double>(nsteps);

    // Right-limit damping at the segment start overrides the left-limit
    // value recorded when the previous segment closed.
    traj.damping_after.back() = gamma_at(branch, a, filter_state);

    // Classic RK4 on the joint state (amplitude, filter).
    auto deriv = [&](double t, double amp, double vd, double& damp,
                     double& dvd) {
      const double v_in = branch_voltage(branch, t, pulse);
      double v_eff = v_in;
      if (tau_c > 0.0) {
        dvd = (v_in - vd) / tau_c;
        v_eff = vd;
      } else {
        dvd = 0.0;
      }
      damp = -0.5 * (background + model(v_eff)) * amp;
    };

    for (std::size_t i = 0; i < nsteps; ++i) {
      const double t0 = a + static_cast<double>(i) * h;
      const double t1 = (i + 1 == nsteps) ? b : t0 + h;
      const double tm = t0 + 0.5 * h;

      double k1a, k1v, k2a, k2v, k3a, k3v, k4a, k4v;
      deriv(t0, amplitude, filter_state, k1a, k1v);
      deriv(tm, amplitude + 0.5 * h * k1a, filter_state + 0.5 * h * k1v, k2a,
            k2v);
      deriv(tm, amplitude + 0.5 * h * k2a, filter_state + 0.5 * h * k2v, k3a,
            k3v);
      deriv(t1, amplitude + h * k3a, filter_state + h * k3v, k4a, k4v);

      amplitude += h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
      filter_state += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);

      const double g1 = gamma_at(branch, t1, filter_state);
      traj.times.push_back(t1);
      traj.amplitudes.push_back(amplitude);
      traj.damping_before.push_back(g1);
      traj.damping_after.push_back(g1);  // fixed up if a new segment follows
    }
  }

  return traj;
}

double predicted_log_ratio(const Timeline& timeline,
                           const AnalysisRates& rates) {
  validate(timeline);
  const double edges = timeline.pulse.rise_time + timeline.pulse.fall_time;
  const double window = timeline.probe_after - timeline.probe_before;
  const double tau = timeline.pulse.width;
  return -0.5 * (rates.qcr_on * (tau - edges) +
                 timeline.environment.background() * window +
                 rates.edge_effective * edges + rates.qcr_off * (window - tau));
}

double edge_average_damping(const BiasPulse& pulse, const DampingModel& model) {
  validate(pulse);
  const double edges = pulse.rise_time + pulse.fall_time;
  if (edges == 0.0) {
    return model(0.0);
  }
  QuadratureOptions options;
  options.rel_tol = 1e-10;
  double integral = 0.0;
  if (pulse.rise_time > 0.0) {
    auto f = [&](double t) {
      return model(branch_voltage(Branch::rise, t, pulse));
    };
    integral += integrate_adaptive(
                    f, {pulse.start_time, pulse.start_time + pulse.rise_time},
                    options)
                    .value;
  }
  if (pulse.fall_time > 0.0) {
    auto f = [&](double t) {
      return model(branch_voltage(Branch::fall, t, pulse));
    };
    integral += integrate_adaptive(
                    f, {pulse.end_time() - pulse.fall_time, pulse.end_time()},
                    options)
                    .value;
  }
  return integral / edges;
}

}  // namespace qcr
