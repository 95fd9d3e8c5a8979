#include "qcr/tunneling.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <string>
#include <vector>

#include "qcr/constants.hpp"
#include "qcr/errors.hpp"
#include "qcr/quadrature.hpp"

namespace qcr {

TunnelKernelParams kernel_params(const DeviceParams& params) {
  TunnelKernelParams k;
  k.gap_energy = params.gap_energy;
  k.dynes_parameter = params.dynes_parameter;
  k.temperature = params.electron_temperature;
  k.tunnel_resistance = params.tunnel_resistance;
  return k;
}

double dynes_dos(double eps, double gap_energy, double dynes_parameter) {
  const std::complex<double> z(eps / gap_energy, dynes_parameter);
  const std::complex<double> w = z / std::sqrt(z * z - 1.0);
  return std::abs(w.real());
}

double fermi_occupation(double eps, double temperature) {
  const double x = eps / (constants::boltzmann * temperature);
  // exp() is only ever called on a nonpositive argument, so the result never
  // overflows; it merely underflows to 0 deep in the tails.
  if (x >= 0.0) {
    const double e = std::exp(-x);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(x));
}

KernelRate forward_rate(double energy, const TunnelKernelParams& params,
                        const DosOverride& dos_override) {
  const double gap = params.gap_energy;
  if (!(std::abs(energy) <= 20.0 * gap)) {
    throw RangeError("forward_rate: |E| exceeds 20*Delta guard");
  }

  const double temperature = params.temperature;
  const double dynes = params.dynes_parameter;

  auto integrand = [&](double eps) {
    const double dos = dos_override ? dos_override(eps)
                                    : dynes_dos(eps, gap, dynes);
    // The empty-state factor 1 - f(eps) is evaluated as f(-eps): the exact
    // complement identity. Forming 1 - f directly cancels catastrophically
    // for eps << 0 and leaves ~1e-7 relative noise in the very region that
    // dominates F at large negative E.
    return dos * fermi_occupation(eps - energy, temperature) *
           fermi_occupation(-eps, temperature);
  };

  // Fermi factors kill the integrand beyond a few k_B*T of [min(0,E),
  // max(0,E)]; +-40*Delta (plus |E|) bounds the truncated tails below 1e-16
  // of the total for any reachable temperature.
  const double half_span = 40.0 * gap + std::abs(energy);
  std::vector<double> breakpoints = {-half_span, -gap, 0.0, gap, energy,
                                     half_span};
  // The broadened gap-edge peaks have width ~gamma_D*Delta, orders of
  // magnitude narrower than any other feature. Geometric pre-splits around
  // +-Delta hand the adaptive loop panels that already isolate the peaks.
  for (double side : {-1.0, 1.0}) {
    for (double delta : {1e-1, 1e-2, 1e-3, 1e-4}) {
      breakpoints.push_back(side * gap * (1.0 + delta));
      breakpoints.push_back(side * gap * (1.0 - delta));
    }
  }

  QuadratureOptions options;
  options.rel_tol = 1e-9;
  options.max_panels = 4000;
  const QuadratureResult integral =
      integrate_adaptive(integrand, std::move(breakpoints), options);

  const double rel_error =
      integral.value != 0.0 ? integral.abs_error / std::abs(integral.value)
                            : integral.abs_error;
  if (!(rel_error <= 1e-8)) {
    char achieved[32];
    std::snprintf(achieved, sizeof achieved, "%.3e", rel_error);
    throw QuadratureError(
        "forward_rate: quadrature did not converge (achieved relative error " +
            std::string(achieved) + ")",
        rel_error);
  }

  KernelRate result;
  result.rate = integral.value / constants::planck;
  result.rel_error = rel_error;
  return result;
}

}  // namespace qcr
