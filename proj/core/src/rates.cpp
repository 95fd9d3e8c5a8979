#include "qcr/rates.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <ostream>
#include <string>
#include <thread>
#include <utility>

#include "qcr/constants.hpp"
#include "qcr/errors.hpp"
#include "text_format.hpp"

namespace qcr {

namespace {

double rate_prefactor(const DerivedParams& d, const TunnelKernelParams& k) {
  return d.interaction_parameter * 2.0 * d.resistance_quantum /
         k.tunnel_resistance;
}

}  // namespace

TransitionRates transition_rates(double bias_voltage, const DerivedParams& d,
                                 const TunnelKernelParams& k) {
  const double half_bias_energy =
      constants::elementary_charge * bias_voltage / 2.0;
  if (!(std::abs(2.0 * half_bias_energy) <= 10.0 * k.gap_energy)) {
    throw RangeError("transition_rates: |eV| exceeds 10*Delta guard");
  }
  const double photon = d.photon_energy;
  const double prefactor = rate_prefactor(d, k);

  // Each rate sums the two junction branches (+eV/2 and -eV/2). Plain
  // two-term addition keeps the result bit-identical under V -> -V.
  const double down = forward_rate(half_bias_energy + photon, k).rate +
                      forward_rate(-half_bias_energy + photon, k).rate;
  const double up = forward_rate(half_bias_energy - photon, k).rate +
                    forward_rate(-half_bias_energy - photon, k).rate;

  TransitionRates rates;
  rates.photon_absorption = prefactor * down;
  rates.photon_emission = prefactor * up;
  return rates;
}

double qcr_damping(double bias_voltage, const DerivedParams& d,
                   const TunnelKernelParams& k) {
  const TransitionRates rates = transition_rates(bias_voltage, d, k);
  return rates.photon_absorption - rates.photon_emission;
}

double effective_temperature(const TransitionRates& rates,
                             double photon_energy) {
  if (!(rates.photon_absorption > rates.photon_emission) ||
      !(rates.photon_emission > 0.0)) {
    throw NoCoolingError("no cooling at this bias (emission >= absorption)");
  }
  return photon_energy /
         (constants::boltzmann *
          std::log(rates.photon_absorption / rates.photon_emission));
}

double effective_temperature(double bias_voltage, const DerivedParams& d,
                             const TunnelKernelParams& k) {
  return effective_temperature(transition_rates(bias_voltage, d, k),
                               d.photon_energy);
}

RateCurve rate_curve(const std::vector<double>& bias_grid,
                     const DeviceParams& device, int jobs) {
  if (bias_grid.empty()) {
    throw ConfigError("rate_curve: empty bias grid");
  }
  for (std::size_t i = 0; i + 1 < bias_grid.size(); ++i) {
    if (!(bias_grid[i] < bias_grid[i + 1])) {
      throw ConfigError("rate_curve: bias grid must be strictly increasing");
    }
  }
  validate(device);
  const DerivedParams d = derive(device);
  const TunnelKernelParams k = kernel_params(device);

  RateCurve curve;
  curve.device_hash = params_hash(device);
  curve.points.resize(bias_grid.size());

  auto evaluate_point = [&](std::size_t i) {
    const double bias = bias_grid[i];
    try {
      const TransitionRates rates = transition_rates(bias, d, k);
      RatePoint& point = curve.points[i];
      point.bias_voltage = bias;
      point.photon_absorption = rates.photon_absorption;
      point.photon_emission = rates.photon_emission;
      point.damping = rates.photon_absorption - rates.photon_emission;
      point.effective_temperature =
          effective_temperature(rates, d.photon_energy);
    } catch (const Error& e) {
      throw NumericsError("rate_curve: failure at V = " +
                          detail::format_double(bias / constants::micro_volt) +
                          " uV: " + e.what());
    }
  };

  const std::size_t n = bias_grid.size();
  const unsigned hardware = std::thread::hardware_concurrency();
  const std::size_t workers =
      std::min<std::size_t>(n, std::max<std::size_t>(
                                   1, jobs > 0 ? static_cast<std::size_t>(jobs)
                                               : std::max(1u, hardware)));

  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) evaluate_point(i);
    return curve;
  }

  // Work stealing over an atomic counter; results land at fixed indices, so
  // output order is independent of scheduling.
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> failures(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
          evaluate_point(i);
        }
      } catch (...) {
        failures[w] = std::current_exception();
        next.store(n);  // drain remaining work
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }
  return curve;
}

void write_rate_curve_csv(const RateCurve& curve, double gap_energy,
                          std::ostream& out) {
  out << "eV_over_2Delta,V_uV,Gamma_down_1_per_s,Gamma_up_1_per_s,"
         "gamma_qcr_1_per_s,T_eff_K\n";
  for (const RatePoint& p : curve.points) {
    const double fraction = constants::elementary_charge * p.bias_voltage /
                            (2.0 * gap_energy);
    out << detail::format_double(fraction, 9) << ','
        << detail::format_double(p.bias_voltage / constants::micro_volt, 9)
        << ',' << detail::format_double(p.photon_absorption, 9) << ','
        << detail::format_double(p.photon_emission, 9) << ','
        << detail::format_double(p.damping, 9) << ','
        << detail::format_double(p.effective_temperature, 9) << '\n';
  }
}

DampingInterpolator::DampingInterpolator(const RateCurve& curve) {
  if (curve.points.size() < 2) {
    throw NumericsError("DampingInterpolator: need at least 2 curve points");
  }
  std::vector<double> bias;
  std::vector<double> log_damping;
  bias.reserve(curve.points.size());
  log_damping.reserve(curve.points.size());
  for (const RatePoint& p : curve.points) {
    if (p.bias_voltage < 0.0) {
      throw NumericsError(
          "DampingInterpolator: tabulate the nonnegative branch only (the "
          "curve is even in V)");
    }
    if (!(p.damping > 0.0)) {
      throw NumericsError("DampingInterpolator: non-positive damping point");
    }
    bias.push_back(p.bias_voltage);
    log_damping.push_back(std::log(p.damping));
  }
  spline_ = MonotoneCubic(std::move(bias), std::move(log_damping));
}

double DampingInterpolator::operator()(double bias_voltage) const {
  return std::exp(spline_(std::abs(bias_voltage)));
}

}  // namespace qcr
