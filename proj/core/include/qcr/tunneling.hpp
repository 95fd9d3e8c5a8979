#pragma once

#include <functional>

#include "qcr/params.hpp"

namespace qcr {

// Junction-level inputs of the tunneling kernel, shared with DeviceParams.
struct TunnelKernelParams {
  double gap_energy = 0.0;         // Delta, J
  double dynes_parameter = 0.0;    // gamma_D, dimensionless
  double temperature = 0.0;        // T_N, K (both electrodes)
  double tunnel_resistance = 0.0;  // R_T, ohm (used by rate prefactors)

  friend bool operator==(const TunnelKernelParams&,
                         const TunnelKernelParams&) = default;
};

TunnelKernelParams kernel_params(const DeviceParams& params);

// Broadened superconducting density of states,
//   n_S(eps) = | Re[ (eps/Delta + i*gamma_D) / sqrt((eps/Delta + i*gamma_D)^2 - 1) ] |.
// Even in eps, bounded below by ~gamma_D/2 in the subgap, and -> 1 at large
// |eps|. The broadening parameter regularizes the gap-edge singularity.
double dynes_dos(double eps, double gap_energy, double dynes_parameter);

// Fermi occupation 1/(1 + exp(eps / (k_B T))), branch-stable for
// |eps|/(k_B T) up to ~700 in either direction.
double fermi_occupation(double eps, double temperature);

struct KernelRate {
  double rate = 0.0;       // F(E), 1/s
  double rel_error = 0.0;  // achieved relative quadrature error
};

// Optional replacement for the density of states, used by tests to drive the
// kernel into analytically solvable limits (e.g. constant 1 for the
// normal-metal case). Receives the energy in joules.
using DosOverride = std::function<double(double)>;

// Thermally weighted tunneling-rate function
//   F(E) = (1/h) * Integral deps n_S(eps) f(eps - E) [1 - f(eps)],
// the kernel of every refrigerator rate. Nonnegative and monotone
// nondecreasing in E; obeys F(-E) = exp(-E/(k_B T)) F(E).
//
// Preconditions: |E| <= 20*Delta. The integral is evaluated adaptively over
// [-40*Delta - |E|, +40*Delta + |E|] with panel seeds at the gap edges; if
// the relative error cannot be brought to 1e-8 a QuadratureError carrying the
// achieved error is thrown.
KernelRate forward_rate(double energy, const TunnelKernelParams& params,
                        const DosOverride& dos_override = nullptr);

}  // namespace qcr
