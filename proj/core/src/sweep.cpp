#include "qcr/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>
#include <utility>

#include <nlohmann/json.hpp>

#include "qcr/constants.hpp"
#include "qcr/errors.hpp"
#include "qcr/rng.hpp"
#include "text_format.hpp"

namespace qcr {

namespace {

using nlohmann::json;

constexpr const char* manifest_name = "manifest.json";

double pair_gap_voltage(const DeviceParams& device) {
  return 2.0 * device.gap_energy / constants::elementary_charge;
}

void require_sorted_grid(const std::vector<double>& grid, const char* name) {
  if (grid.empty()) {
    throw ConfigError(std::string("sweep: empty grid '") + name + "'");
  }
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (!(grid[i] < grid[i + 1])) {
      throw ConfigError(std::string("sweep: grid '") + name +
                        "' must be strictly increasing");
    }
  }
}

json timeline_spec_to_json(const TimelineSpec& t) {
  json doc;
  doc["drive_end_ns"] = t.drive_end_ns;
  doc["probe_before_ns"] = t.probe_before_ns;
  doc["pulse_start_ns"] = t.pulse_start_ns;
  doc["probe_after_ns"] = t.probe_after_ns;
  doc["end_time_ns"] = t.end_time_ns;
  doc["samples_per_ns"] = t.samples_per_ns;
  return doc;
}

TimelineSpec timeline_spec_from_json(const json& doc) {
  if (!doc.is_object()) {
    throw ConfigError("sweep spec: 'timeline' must be a JSON object");
  }
  TimelineSpec t;
  auto fetch = [&](const char* key, double& field) {
    if (auto it = doc.find(key); it != doc.end()) field = it->get<double>();
  };
  fetch("drive_end_ns", t.drive_end_ns);
  fetch("probe_before_ns", t.probe_before_ns);
  fetch("pulse_start_ns", t.pulse_start_ns);
  fetch("probe_after_ns", t.probe_after_ns);
  fetch("end_time_ns", t.end_time_ns);
  fetch("samples_per_ns", t.samples_per_ns);
  return t;
}

json sweep_spec_to_json(const SweepSpec& s) {
  json doc;
  doc["voltage_fractions"] = s.voltage_fractions;
  doc["widths_ns"] = s.widths_ns;
  doc["edge_times_ns"] = s.edge_times_ns;
  doc["noise_sigma"] = s.noise_sigma;
  doc["n_avg"] = s.n_avg;
  doc["seed"] = s.seed;
  doc["control_line_tau_ns"] = s.control_line_tau_ns;
  doc["timeline"] = timeline_spec_to_json(s.timeline);
  return doc;
}

SweepSpec sweep_spec_from_json(const json& doc) {
  if (!doc.is_object()) {
    throw ConfigError("sweep spec: expected a JSON object");
  }
  SweepSpec s;
  if (auto it = doc.find("voltage_fractions"); it != doc.end()) {
    s.voltage_fractions = it->get<std::vector<double>>();
  }
  if (auto it = doc.find("widths_ns"); it != doc.end()) {
    s.widths_ns = it->get<std::vector<double>>();
  }
  if (auto it = doc.find("edge_times_ns"); it != doc.end()) {
    s.edge_times_ns = it->get<std::vector<double>>();
  }
  if (auto it = doc.find("noise_sigma"); it != doc.end()) {
    s.noise_sigma = it->get<double>();
  }
  if (auto it = doc.find("n_avg"); it != doc.end()) {
    s.n_avg = it->get<std::uint64_t>();
  }
  if (auto it = doc.find("seed"); it != doc.end()) {
    s.seed = it->get<std::uint64_t>();
  }
  if (auto it = doc.find("control_line_tau_ns"); it != doc.end()) {
    s.control_line_tau_ns = it->get<double>();
  }
  if (auto it = doc.find("timeline"); it != doc.end()) {
    s.timeline = timeline_spec_from_json(*it);
  }
  return s;
}

json estimate_to_json(const DampingEstimate& e) {
  json doc;
  doc["gamma_1_per_s"] = e.gamma;
  doc["sigma_1_per_s"] = e.sigma;
  doc["breakpoint_tau_ns"] = e.breakpoint_tau_ns;
  doc["n_points_used"] = e.n_points_used;
  doc["residual_rms"] = e.residual_rms;
  return doc;
}

DampingEstimate estimate_from_json(const json& doc) {
  DampingEstimate e;
  e.gamma = doc.at("gamma_1_per_s").get<double>();
  e.sigma = doc.at("sigma_1_per_s").get<double>();
  e.breakpoint_tau_ns = doc.at("breakpoint_tau_ns").get<double>();
  e.n_points_used = doc.at("n_points_used").get<std::size_t>();
  e.residual_rms = doc.at("residual_rms").get<double>();
  return e;
}

const char* status_label(GroupStatus status) {
  switch (status) {
    case GroupStatus::ok:
      return "ok";
    case GroupStatus::insufficient_linear_region:
      return "insufficient_linear_region";
    case GroupStatus::fit_failure:
      return "fit_failure";
  }
  return "fit_failure";
}

GroupStatus status_from_label(const std::string& label) {
  if (label == "ok") return GroupStatus::ok;
  if (label == "insufficient_linear_region") {
    return GroupStatus::insufficient_linear_region;
  }
  return GroupStatus::fit_failure;
}

// Malformed user-authored documents (sweep specs) are configuration errors;
// malformed machine-written artifacts (manifests, reports) are I/O errors.
json parse_json_document(const std::string& text, const char* what,
                         bool user_authored = false) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) {
    const std::string message = std::string("malformed JSON in ") + what;
    if (user_authored) throw ConfigError(message);
    throw IoError(message);
  }
  return doc;
}

std::string read_text_file(const std::string& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError(std::string("cannot open ") + what + " '" + path + "'");
  }
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

}  // namespace

void validate(const SweepSpec& spec, const DeviceParams& device) {
  validate(device);
  require_sorted_grid(spec.voltage_fractions, "voltage_fractions");
  require_sorted_grid(spec.widths_ns, "widths_ns");
  require_sorted_grid(spec.edge_times_ns, "edge_times_ns");
  for (double f : spec.voltage_fractions) {
    if (!(f > 0.0) || !(f <= 1.3)) {
      throw ConfigError("sweep: voltage fractions must lie in (0, 1.3]");
    }
  }
  if (!(spec.noise_sigma >= 0.0)) {
    throw ConfigError("sweep: noise_sigma must be nonnegative");
  }
  if (spec.n_avg < 1) {
    throw ConfigError("sweep: n_avg must be at least 1");
  }
  if (!(spec.control_line_tau_ns >= 0.0)) {
    throw ConfigError("sweep: control_line_tau_ns must be nonnegative");
  }
  if (!(spec.timeline.samples_per_ns > 0.0)) {
    throw ConfigError("sweep: samples_per_ns must be positive");
  }
  // Every tuple must yield a valid timeline; surface the first violation as
  // a configuration error.
  const double v_max =
      spec.voltage_fractions.back() * pair_gap_voltage(device);
  EnvironmentRates env;  // defaults suffice for structural validation
  for (double edge : spec.edge_times_ns) {
    for (double width : spec.widths_ns) {
      validate(make_timeline(spec.timeline, v_max, width, edge, env));
    }
  }
}

Timeline make_timeline(const TimelineSpec& spec, double plateau_voltage,
                       double width_ns, double edge_ns,
                       const EnvironmentRates& environment) {
  Timeline tl;
  tl.drive_end = spec.drive_end_ns * constants::nanosecond;
  tl.pulse.plateau_voltage = plateau_voltage;
  tl.pulse.width = width_ns * constants::nanosecond;
  tl.pulse.rise_time = edge_ns * constants::nanosecond;
  tl.pulse.fall_time = edge_ns * constants::nanosecond;
  tl.pulse.start_time = spec.pulse_start_ns * constants::nanosecond;
  tl.probe_before = spec.probe_before_ns * constants::nanosecond;
  tl.probe_after = spec.probe_after_ns * constants::nanosecond;
  tl.end_time = spec.end_time_ns * constants::nanosecond;
  tl.environment = environment;
  return tl;
}

std::string sweep_spec_json(const SweepSpec& spec) {
  return sweep_spec_to_json(spec).dump(2) + "\n";
}

SweepSpec parse_sweep_spec(const std::string& json_text) {
  try {
    return sweep_spec_from_json(
        parse_json_document(json_text, "sweep spec", /*user_authored=*/true));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("sweep spec: ") + e.what());
  }
}

std::string manifest_json(const Manifest& manifest) {
  json doc;
  doc["device_hash"] = manifest.device_hash;
  doc["config"] = parse_json_document(write_config(manifest.config),
                                      "config echo");
  doc["spec"] = sweep_spec_to_json(manifest.spec);
  json entries = json::array();
  for (const ManifestEntry& e : manifest.entries) {
    json entry;
    entry["V_p_uV"] = e.plateau_uv;
    entry["fraction"] = e.plateau_fraction;
    entry["tau_ns"] = e.tau_ns;
    entry["dt_ns"] = e.edge_ns;
    entry["seed"] = e.trace_seed;
    entry["file"] = e.file;
    entries.push_back(std::move(entry));
  }
  doc["entries"] = std::move(entries);
  return doc.dump(2) + "\n";
}

Manifest parse_manifest(const std::string& json_text) {
  try {
    const json doc = parse_json_document(json_text, "manifest");
    Manifest manifest;
    manifest.device_hash = doc.at("device_hash").get<std::uint64_t>();
    manifest.config = load_config(doc.at("config").dump());
    manifest.spec = sweep_spec_from_json(doc.at("spec"));
    for (const json& entry : doc.at("entries")) {
      ManifestEntry e;
      e.plateau_uv = entry.at("V_p_uV").get<double>();
      e.plateau_fraction = entry.at("fraction").get<double>();
      e.tau_ns = entry.at("tau_ns").get<double>();
      e.edge_ns = entry.at("dt_ns").get<double>();
      e.trace_seed = entry.at("seed").get<std::uint64_t>();
      e.file = entry.at("file").get<std::string>();
      manifest.entries.push_back(std::move(e));
    }
    return manifest;
  } catch (const json::exception& e) {
    throw IoError(std::string("manifest: ") + e.what());
  }
}

Manifest simulate_sweep(const Config& config, const SweepSpec& spec,
                        const std::string& out_dir, int jobs) {
  validate(config.device);
  validate(config.environment);
  validate(spec, config.device);

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw IoError("simulate_sweep: cannot create output directory '" +
                  out_dir + "': " + ec.message());
  }

  // One rate curve covers every pulse height; 241 points over the swept
  // range resolve the activation flank comfortably for interpolation.
  const double v_top =
      spec.voltage_fractions.back() * pair_gap_voltage(config.device);
  std::vector<double> bias_grid(241);
  for (std::size_t i = 0; i < bias_grid.size(); ++i) {
    bias_grid[i] = v_top * static_cast<double>(i) /
                   static_cast<double>(bias_grid.size() - 1);
  }
  const RateCurve curve = rate_curve(bias_grid, config.device, jobs);
  const DampingInterpolator model(curve);

  struct Tuple {
    std::size_t v, e, t;
  };
  std::vector<Tuple> tuples;
  tuples.reserve(spec.voltage_fractions.size() * spec.edge_times_ns.size() *
                 spec.widths_ns.size());
  for (std::size_t v = 0; v < spec.voltage_fractions.size(); ++v) {
    for (std::size_t e = 0; e < spec.edge_times_ns.size(); ++e) {
      for (std::size_t t = 0; t < spec.widths_ns.size(); ++t) {
        tuples.push_back({v, e, t});
      }
    }
  }

  Manifest manifest;
  manifest.device_hash = params_hash(config.device);
  manifest.config = config;
  manifest.spec = spec;
  manifest.entries.resize(tuples.size());

  const double tau_c = spec.control_line_tau_ns * constants::nanosecond;
  const double pair_voltage = pair_gap_voltage(config.device);

  auto run_tuple = [&](std::size_t index) {
    const Tuple tuple = tuples[index];
    const double fraction = spec.voltage_fractions[tuple.v];
    const double edge_ns = spec.edge_times_ns[tuple.e];
    const double tau_ns = spec.widths_ns[tuple.t];
    const double plateau = fraction * pair_voltage;

    const Timeline timeline = make_timeline(spec.timeline, plateau, tau_ns,
                                            edge_ns, config.environment);
    const AmplitudeTrajectory trajectory =
        evolve_amplitude(timeline, std::cref(model), tau_c);
    const std::uint64_t trace_seed =
        mix_seed(spec.seed, tuple.v, tuple.e, tuple.t);
    const Trace trace = sample_trace(trajectory, spec.timeline.samples_per_ns,
                                     spec.noise_sigma, spec.n_avg, trace_seed,
                                     timeline_hash(timeline));
    const std::string file = "trace_v" + std::to_string(tuple.v) + "_e" +
                             std::to_string(tuple.e) + "_t" +
                             std::to_string(tuple.t) + ".csv";
    write_trace(trace, (std::filesystem::path(out_dir) / file).string());

    ManifestEntry& entry = manifest.entries[index];
    entry.plateau_uv = plateau / constants::micro_volt;
    entry.plateau_fraction = fraction;
    entry.tau_ns = tau_ns;
    entry.edge_ns = edge_ns;
    entry.trace_seed = trace_seed;
    entry.file = file;
  };

  const std::size_t n = tuples.size();
  const std::size_t workers = std::min<std::size_t>(
      n, std::max<std::size_t>(
             1, jobs > 0 ? static_cast<std::size_t>(jobs)
                         : std::max(1u, std::thread::hardware_concurrency())));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) run_tuple(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> failures(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = next.fetch_add(1); i < n;
               i = next.fetch_add(1)) {
            run_tuple(i);
          }
        } catch (...) {
          failures[w] = std::current_exception();
          next.store(n);
        }
      });
    }
    for (auto& t : pool) t.join();
    for (const auto& failure : failures) {
      if (failure) std::rethrow_exception(failure);
    }
  }

  std::ofstream out(
      (std::filesystem::path(out_dir) / manifest_name).string(),
      std::ios::binary);
  if (!out) {
    throw IoError("simulate_sweep: cannot write manifest in '" + out_dir +
                  "'");
  }
  out << manifest_json(manifest);
  return manifest;
}

FitReport extract_sweep(const std::string& trace_dir, double t_b_ns,
                        double t_a_ns) {
  const std::string manifest_path =
      (std::filesystem::path(trace_dir) / manifest_name).string();
  const Manifest manifest =
      parse_manifest(read_text_file(manifest_path, "manifest"));
  if (manifest.entries.empty()) {
    throw IoError("extract_sweep: manifest lists no traces");
  }
  const TimelineSpec& tspec = manifest.spec.timeline;
  if (std::isnan(t_b_ns)) t_b_ns = tspec.probe_before_ns;
  if (std::isnan(t_a_ns)) t_a_ns = tspec.probe_after_ns;

  FitReport report;
  report.excess_fraction = manifest.config.environment.excess_fraction;

  // Group traces by (voltage, edge), keeping first-seen order.
  struct Group {
    double plateau_uv = 0.0;
    double fraction = 0.0;
    double edge_ns = 0.0;
    std::vector<double> taus_ns;
    std::vector<Trace> traces;
  };
  std::vector<Group> groups;
  std::map<std::pair<double, double>, std::size_t> group_index;
  Trace first_trace;
  bool have_first = false;

  for (const ManifestEntry& entry : manifest.entries) {
    Trace trace = read_trace(
        (std::filesystem::path(trace_dir) / entry.file).string());
    if (!have_first) {
      first_trace = trace;
      have_first = true;
    }
    const auto key = std::make_pair(entry.plateau_uv, entry.edge_ns);
    auto it = group_index.find(key);
    if (it == group_index.end()) {
      it = group_index.emplace(key, groups.size()).first;
      Group group;
      group.plateau_uv = entry.plateau_uv;
      group.fraction = entry.plateau_fraction;
      group.edge_ns = entry.edge_ns;
      groups.push_back(std::move(group));
    }
    Group& group = groups[it->second];
    group.taus_ns.push_back(entry.tau_ns);
    group.traces.push_back(std::move(trace));
  }

  report.pre_pulse =
      fit_pre_pulse(first_trace, tspec.drive_end_ns, t_b_ns);
  report.line_damping = report.pre_pulse;
  report.line_damping.gamma /= 1.0 + report.excess_fraction;
  report.line_damping.sigma /= 1.0 + report.excess_fraction;

  for (Group& group : groups) {
    // Sort the group by pulse width.
    std::vector<std::size_t> order(group.taus_ns.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return group.taus_ns[a] < group.taus_ns[b];
    });
    std::vector<double> taus;
    std::vector<Trace> traces;
    taus.reserve(order.size());
    traces.reserve(order.size());
    for (std::size_t i : order) {
      taus.push_back(group.taus_ns[i]);
      traces.push_back(std::move(group.traces[i]));
    }

    SweepGroupResult result;
    result.plateau_uv = group.plateau_uv;
    result.plateau_fraction = group.fraction;
    result.edge_ns = group.edge_ns;
    try {
      result.points = log_ratio_points(traces, taus, t_b_ns, t_a_ns);
      const std::size_t breakpoint = detect_flat_region(result.points);
      result.estimate = fit_gamma_qcr(result.points, breakpoint);
      result.status = GroupStatus::ok;

      // Residuals against the fitted two-piece model.
      double flat_mean = 0.0;
      for (std::size_t i = 0; i < breakpoint; ++i) {
        flat_mean += result.points[i].log_ratio;
      }
      if (breakpoint > 0) flat_mean /= static_cast<double>(breakpoint);
      std::vector<double> x, y, sigma;
      bool weighted = true;
      for (std::size_t i = breakpoint; i < result.points.size(); ++i) {
        x.push_back(result.points[i].tau_ns * constants::nanosecond);
        y.push_back(result.points[i].log_ratio);
        if (result.points[i].sigma_y > 0.0) {
          sigma.push_back(result.points[i].sigma_y);
        } else {
          weighted = false;
        }
      }
      if (!weighted) sigma.clear();
      const LineFit line = fit_weighted_line(x, y, sigma);
      result.residuals.resize(result.points.size());
      for (std::size_t i = 0; i < result.points.size(); ++i) {
        if (i < breakpoint) {
          result.residuals[i] = result.points[i].log_ratio - flat_mean;
        } else {
          result.residuals[i] =
              result.points[i].log_ratio -
              (line.intercept +
               line.slope * result.points[i].tau_ns * constants::nanosecond);
        }
      }
    } catch (const InsufficientLinearRegionError& e) {
      result.status = GroupStatus::insufficient_linear_region;
      result.note = e.what();
    } catch (const FitError& e) {
      result.status = GroupStatus::fit_failure;
      result.note = e.what();
    }
    report.groups.push_back(std::move(result));
  }
  return report;
}

std::string fit_report_json(const FitReport& report) {
  json doc;
  doc["pre_pulse"] = estimate_to_json(report.pre_pulse);
  doc["excess_fraction"] = report.excess_fraction;
  doc["line_damping"] = estimate_to_json(report.line_damping);
  json groups = json::array();
  for (const SweepGroupResult& g : report.groups) {
    json group;
    group["V_p_uV"] = g.plateau_uv;
    group["fraction"] = g.plateau_fraction;
    group["dt_ns"] = g.edge_ns;
    group["status"] = status_label(g.status);
    if (!g.note.empty()) group["note"] = g.note;
    if (g.status == GroupStatus::ok) {
      group["estimate"] = estimate_to_json(g.estimate);
    }
    json points = json::array();
    for (const SweepPoint& p : g.points) {
      json point;
      point["tau_ns"] = p.tau_ns;
      point["log_ratio"] = p.log_ratio;
      point["sigma_y"] = p.sigma_y;
      points.push_back(std::move(point));
    }
    group["points"] = std::move(points);
    group["residuals"] = g.residuals;
    groups.push_back(std::move(group));
  }
  doc["groups"] = std::move(groups);
  return doc.dump(2) + "\n";
}

FitReport parse_fit_report(const std::string& json_text) {
  try {
  const json doc = parse_json_document(json_text, "fit report");
  FitReport report;
  report.pre_pulse = estimate_from_json(doc.at("pre_pulse"));
  report.excess_fraction = doc.at("excess_fraction").get<double>();
  report.line_damping = estimate_from_json(doc.at("line_damping"));
  for (const json& group : doc.at("groups")) {
    SweepGroupResult g;
    g.plateau_uv = group.at("V_p_uV").get<double>();
    g.plateau_fraction = group.at("fraction").get<double>();
    g.edge_ns = group.at("dt_ns").get<double>();
    g.status = status_from_label(group.at("status").get<std::string>());
    if (group.contains("note")) g.note = group.at("note").get<std::string>();
    if (g.status == GroupStatus::ok) {
      g.estimate = estimate_from_json(group.at("estimate"));
    }
    for (const json& point : group.at("points")) {
      SweepPoint p;
      p.tau_ns = point.at("tau_ns").get<double>();
      p.log_ratio = point.at("log_ratio").get<double>();
      p.sigma_y = point.at("sigma_y").get<double>();
      g.points.push_back(p);
    }
    g.residuals = group.at("residuals").get<std::vector<double>>();
    report.groups.push_back(std::move(g));
  }
  return report;
  } catch (const json::exception& e) {
    throw IoError(std::string("fit report: ") + e.what());
  }
}

void write_sweep_points_csv(const FitReport& report, std::ostream& out) {
  out << "V_p_uV,dt_ns,tau_ns,log_ratio,sigma_y,residual\n";
  for (const SweepGroupResult& g : report.groups) {
    for (std::size_t i = 0; i < g.points.size(); ++i) {
      const SweepPoint& p = g.points[i];
      const double residual =
          i < g.residuals.size() ? g.residuals[i] : 0.0;
      out << detail::format_double(g.plateau_uv) << ','
          << detail::format_double(g.edge_ns) << ','
          << detail::format_double(p.tau_ns) << ','
          << detail::format_double(p.log_ratio) << ','
          << detail::format_double(p.sigma_y) << ','
          << detail::format_double(residual) << '\n';
    }
  }
}

}  // namespace qcr
