#include "qcr/params.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qcr/constants.hpp"
#include "qcr/errors.hpp"
#include "qcr/hashing.hpp"
#include "text_format.hpp"

namespace qcr {

namespace {

using nlohmann::json;

void require_positive(double value, const char* field) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ConfigError(std::string("non-positive ") + field);
  }
}

double get_number(const json& doc, const char* field) {
  auto it = doc.find(field);
  if (it == doc.end()) {
    throw ConfigError(std::string("missing field '") + field + "'");
  }
  if (!it->is_number()) {
    throw ConfigError(std::string("field '") + field + "' is not a number");
  }
  return it->get<double>();
}

json device_to_json(const DeviceParams& p) {
  json doc;
  doc["R_T_kohm"] = p.tunnel_resistance / constants::kilo_ohm;
  doc["T_N_K"] = p.electron_temperature;
  doc["gamma_D"] = p.dynes_parameter;
  doc["Z_r_ohm"] = p.resonator_impedance;
  doc["C_c_fF"] = p.coupling_capacitance / constants::femto_farad;
  doc["C_m_fF"] = p.junction_capacitance / constants::femto_farad;
  doc["f0_GHz"] = p.mode_frequency / constants::giga_hertz;
  doc["Delta_ueV"] = p.gap_energy / constants::micro_ev;
  return doc;
}

DeviceParams device_from_json(const json& doc) {
  DeviceParams p;
  p.tunnel_resistance = get_number(doc, "R_T_kohm") * constants::kilo_ohm;
  p.electron_temperature = get_number(doc, "T_N_K");
  p.dynes_parameter = get_number(doc, "gamma_D");
  p.resonator_impedance = get_number(doc, "Z_r_ohm");
  p.coupling_capacitance = get_number(doc, "C_c_fF") * constants::femto_farad;
  p.junction_capacitance = get_number(doc, "C_m_fF") * constants::femto_farad;
  p.mode_frequency = get_number(doc, "f0_GHz") * constants::giga_hertz;
  p.gap_energy = get_number(doc, "Delta_ueV") * constants::micro_ev;
  validate(p);
  return p;
}

json environment_to_json(const EnvironmentRates& env) {
  json doc;
  doc["gamma_tr_1_per_s"] = env.line_damping;
  doc["gamma_x_fraction"] = env.excess_fraction;
  doc["gamma_qcr_off_1_per_s"] = env.off_state_damping;
  return doc;
}

EnvironmentRates environment_from_json(const json& doc) {
  EnvironmentRates env;
  try {
    if (auto it = doc.find("gamma_tr_1_per_s"); it != doc.end()) {
      env.line_damping = it->get<double>();
    }
    if (auto it = doc.find("gamma_x_fraction"); it != doc.end()) {
      env.excess_fraction = it->get<double>();
    }
    if (auto it = doc.find("gamma_qcr_off_1_per_s"); it != doc.end()) {
      env.off_state_damping = it->get<double>();
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("environment: ") + e.what());
  }
  validate(env);
  return env;
}

json parse_json(const std::string& text) {
  json doc = json::parse(text, /*cb=*/nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) {
    throw ConfigError("malformed JSON configuration document");
  }
  return doc;
}

}  // namespace

void validate(const DeviceParams& p) {
  require_positive(p.tunnel_resistance, "R_T");
  require_positive(p.electron_temperature, "T_N");
  require_positive(p.dynes_parameter, "gamma_D");
  require_positive(p.resonator_impedance, "Z_r");
  require_positive(p.coupling_capacitance, "C_c");
  require_positive(p.junction_capacitance, "C_m");
  require_positive(p.mode_frequency, "f_0");
  require_positive(p.gap_energy, "Delta");
  if (!(p.dynes_parameter < 1.0)) {
    throw ConfigError("gamma_D must be below 1");
  }
  if (!(constants::planck * p.mode_frequency < p.gap_energy)) {
    throw ConfigError("photon energy exceeds gap (h*f_0 >= Delta)");
  }
}

void validate(const EnvironmentRates& env) {
  require_positive(env.line_damping, "gamma_tr");
  if (!(env.excess_fraction >= 0.0) || !(env.excess_fraction < 1.0)) {
    throw ConfigError("gamma_x_fraction must lie in [0, 1)");
  }
  if (!(env.off_state_damping >= 0.0) ||
      !std::isfinite(env.off_state_damping)) {
    throw ConfigError("gamma_qcr_off must be nonnegative");
  }
}

DerivedParams derive(const DeviceParams& p) {
  DerivedParams d;
  d.resistance_quantum = constants::resistance_quantum;
  d.coupling_fraction =
      p.coupling_capacitance /
      (p.coupling_capacitance + 2.0 * p.junction_capacitance);
  d.interaction_parameter = std::numbers::pi * d.coupling_fraction *
                            d.coupling_fraction * p.resonator_impedance /
                            d.resistance_quantum;
  d.photon_energy = constants::planck * p.mode_frequency;
  return d;
}

DeviceParams load_device_params(const std::string& json_text) {
  return device_from_json(parse_json(json_text));
}

std::string write_device_params(const DeviceParams& params) {
  return device_to_json(params).dump(2) + "\n";
}

Config load_config(const std::string& json_text) {
  const json doc = parse_json(json_text);
  Config config;
  if (doc.contains("device")) {
    config.device = device_from_json(doc.at("device"));
    if (doc.contains("environment")) {
      config.environment = environment_from_json(doc.at("environment"));
    }
  } else {
    // Flat documents with the device fields at top level are accepted for
    // convenience; the environment keeps its defaults.
    config.device = device_from_json(doc);
  }
  return config;
}

Config load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot open configuration file '" + path + "'");
  }
  std::ostringstream text;
  text << in.rdbuf();
  return load_config(text.str());
}

std::string write_config(const Config& config) {
  json doc;
  doc["device"] = device_to_json(config.device);
  doc["environment"] = environment_to_json(config.environment);
  return doc.dump(2) + "\n";
}

std::uint64_t params_hash(const DeviceParams& p) {
  // Canonical serialization: fixed field order, shortest round-trip floats.
  std::string canon;
  canon.reserve(160);
  const double fields[] = {
      p.tunnel_resistance,    p.electron_temperature, p.dynes_parameter,
      p.resonator_impedance,  p.coupling_capacitance, p.junction_capacitance,
      p.mode_frequency,       p.gap_energy};
  for (double f : fields) {
    canon += detail::format_double(f);
    canon += ';';
  }
  return fnv1a64(canon);
}

}  // namespace qcr
