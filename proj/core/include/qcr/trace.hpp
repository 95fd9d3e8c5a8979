#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qcr/pulse.hpp"

namespace qcr {

// Origin metadata of a measured/emulated trace; always persisted alongside
// the samples.
struct TraceMeta {
  std::uint64_t timeline_hash = 0;  // fingerprint of the producing Timeline
  double noise_sigma = 0.0;         // per-shot amplitude noise std
  std::uint64_t n_avg = 1;          // repetitions averaged per sample
  std::uint64_t seed = 0;           // RNG stream seed

  friend bool operator==(const TraceMeta&, const TraceMeta&) = default;
};

// Uniformly sampled amplitude record, times in nanoseconds.
struct Trace {
  std::vector<double> times_ns;
  std::vector<double> amplitudes;
  TraceMeta meta;
};

// Emulates an averaged homodyne amplitude measurement of a trajectory:
// samples A(t) on a uniform grid at `samples_per_ns` and adds the mean of
// n_avg independent Gaussian(0, sigma) draws per sample. sigma = 0 returns
// the trajectory samples exactly (no RNG draws). Deterministic for a fixed
// seed; different seeds give independent streams.
Trace sample_trace(const AmplitudeTrajectory& trajectory,
                   double samples_per_ns, double sigma, std::uint64_t n_avg,
                   std::uint64_t seed, std::uint64_t timeline_hash);

// CSV body "t_ns,amplitude" plus a JSON metadata sidecar at path +
// ".meta.json". Numbers use shortest round-trip formatting, so
// read_trace(write_trace(t)) reproduces every value bit-exactly.
void write_trace(const Trace& trace, const std::string& path);

// Throws MalformedCsvError / MissingSidecarError / LengthMismatchError /
// NonMonotonicTimeError for the corresponding defects.
Trace read_trace(const std::string& path);

}  // namespace qcr
