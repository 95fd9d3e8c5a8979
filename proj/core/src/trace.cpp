#include "qcr/trace.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

#include <nlohmann/json.hpp>

#include "qcr/constants.hpp"
#include "qcr/errors.hpp"
#include "qcr/rng.hpp"
#include "text_format.hpp"

namespace qcr {

Trace sample_trace(const AmplitudeTrajectory& trajectory,
                   double samples_per_ns, double sigma, std::uint64_t n_avg,
                   std::uint64_t seed, std::uint64_t timeline_hash) {
  if (!(samples_per_ns > 0.0)) {
    throw NumericsError("sample_trace: sampling rate must be positive");
  }
  if (!(sigma >= 0.0)) {
    throw NumericsError("sample_trace: sigma must be nonnegative");
  }
  if (n_avg < 1) {
    throw NumericsError("sample_trace: n_avg must be at least 1");
  }
  if (trajectory.times.size() < 2) {
    throw NumericsError("sample_trace: trajectory has too few nodes");
  }

  const double t0_ns = trajectory.times.front() / constants::nanosecond;
  const double t1_ns = trajectory.times.back() / constants::nanosecond;
  const double dt_ns = 1.0 / samples_per_ns;
  // Half-period slack so a grid point that lands on the end time by exact
  // arithmetic is kept even if rounding pushed it marginally past.
  const auto n_samples = static_cast<std::size_t>(
      std::floor((t1_ns - t0_ns) / dt_ns + 0.5e-9)) + 1;

  Trace trace;
  trace.meta.timeline_hash = timeline_hash;
  trace.meta.noise_sigma = sigma;
  trace.meta.n_avg = n_avg;
  trace.meta.seed = seed;
  trace.times_ns.reserve(n_samples);
  trace.amplitudes.reserve(n_samples);

  GaussianSampler gauss(seed);
  const double t_lo = trajectory.times.front();
  const double t_hi = trajectory.times.back();
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double t_ns = t0_ns + static_cast<double>(i) * dt_ns;
    const double t = std::clamp(t_ns * constants::nanosecond, t_lo, t_hi);
    double value = trajectory.amplitude_at(t);
    if (sigma > 0.0) {
      double noise_sum = 0.0;
      for (std::uint64_t r = 0; r < n_avg; ++r) noise_sum += gauss();
      value += sigma * noise_sum / static_cast<double>(n_avg);
    }
    trace.times_ns.push_back(t_ns);
    trace.amplitudes.push_back(value);
  }
  return trace;
}

void write_trace(const Trace& trace, const std::string& path) {
  if (trace.times_ns.size() != trace.amplitudes.size()) {
    throw LengthMismatchError("write_trace: time/amplitude length mismatch");
  }
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
      throw IoError("write_trace: cannot open '" + path + "'");
    }
    std::string body;
    body.reserve(32 * trace.times_ns.size() + 16);
    body += "t_ns,amplitude\n";
    for (std::size_t i = 0; i < trace.times_ns.size(); ++i) {
      body += detail::format_double(trace.times_ns[i]);
      body += ',';
      body += detail::format_double(trace.amplitudes[i]);
      body += '\n';
    }
    out << body;
    if (!out) {
      throw IoError("write_trace: write failed for '" + path + "'");
    }
  }
  nlohmann::json meta;
  meta["timeline_hash"] = trace.meta.timeline_hash;
  meta["noise_sigma"] = trace.meta.noise_sigma;
  meta["n_avg"] = trace.meta.n_avg;
  meta["seed"] = trace.meta.seed;
  meta["n_samples"] = trace.times_ns.size();
  std::ofstream side(path + ".meta.json", std::ios::binary);
  if (!side) {
    throw IoError("write_trace: cannot open sidecar for '" + path + "'");
  }
  side << meta.dump(2) << '\n';
  if (!side) {
    throw IoError("write_trace: sidecar write failed for '" + path + "'");
  }
}

Trace read_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("read_trace: cannot open '" + path + "'");
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw MalformedCsvError("read_trace: empty file '" + path + "'");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t_ns,amplitude") {
    throw MalformedCsvError("read_trace: unexpected header '" + line + "'");
  }

  Trace trace;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos ||
        line.find(',', comma + 1) != std::string::npos) {
      throw MalformedCsvError("read_trace: line " + std::to_string(line_no) +
                              " does not have exactly two fields");
    }
    const std::string where = " at line " + std::to_string(line_no);
    const double t = detail::parse_double(
        std::string_view(line).substr(0, comma), "t_ns" + where);
    const double a = detail::parse_double(
        std::string_view(line).substr(comma + 1), "amplitude" + where);
    if (!trace.times_ns.empty() && !(t > trace.times_ns.back())) {
      throw NonMonotonicTimeError("read_trace: non-monotonic time axis at line " +
                                  std::to_string(line_no));
    }
    trace.times_ns.push_back(t);
    trace.amplitudes.push_back(a);
  }

  std::ifstream side(path + ".meta.json", std::ios::binary);
  if (!side) {
    throw MissingSidecarError("read_trace: missing sidecar '" + path +
                              ".meta.json'");
  }
  nlohmann::json meta = nlohmann::json::parse(side, nullptr, false);
  if (meta.is_discarded()) {
    throw MalformedCsvError("read_trace: malformed sidecar JSON for '" + path +
                            "'");
  }
  for (const char* key :
       {"timeline_hash", "noise_sigma", "n_avg", "seed", "n_samples"}) {
    if (!meta.contains(key)) {
      throw MalformedCsvError("read_trace: sidecar missing key '" +
                              std::string(key) + "'");
    }
  }
  std::uint64_t declared_samples = 0;
  try {
    trace.meta.timeline_hash = meta["timeline_hash"].get<std::uint64_t>();
    trace.meta.noise_sigma = meta["noise_sigma"].get<double>();
    trace.meta.n_avg = meta["n_avg"].get<std::uint64_t>();
    trace.meta.seed = meta["seed"].get<std::uint64_t>();
    declared_samples = meta["n_samples"].get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw MalformedCsvError("read_trace: bad sidecar for '" + path +
                            "': " + e.what());
  }
  if (declared_samples != trace.times_ns.size()) {
    throw LengthMismatchError(
        "read_trace: sample count does not match sidecar for '" + path + "'");
  }
  return trace;
}

}  // namespace qcr
