#include <cmath>
#include <string>

#include <doctest.h>

#include "qcr/constants.hpp"
#include "qcr/errors.hpp"
#include "qcr/params.hpp"
#include "support/oracles.hpp"

using namespace qcr;

namespace {

// 40-digit arbitrary-precision references for the reference device.
constexpr double ref_coupling_fraction = 0.98823529411764705882;
constexpr double ref_interaction_parameter = 0.0041600964127155126692;
constexpr double ref_photon_energy_uev = 35.910002612389864625;
constexpr double ref_resistance_quantum = 25812.80745930450666;

double rel_diff(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("derived quantities match arbitrary-precision references") {
  const DeviceParams device = testing::reference_device();
  const DerivedParams derived = derive(device);
  CHECK(rel_diff(derived.coupling_fraction, ref_coupling_fraction) < 1e-15);
  CHECK(rel_diff(derived.interaction_parameter, ref_interaction_parameter) <
        1e-13);
  CHECK(rel_diff(derived.photon_energy / constants::micro_ev,
                 ref_photon_energy_uev) < 1e-13);
  CHECK(rel_diff(derived.resistance_quantum, ref_resistance_quantum) < 1e-15);
}

TEST_CASE("derive is deterministic") {
  const DeviceParams device = testing::reference_device();
  CHECK(derive(device) == derive(device));
}

TEST_CASE("config JSON round trip preserves every field") {
  Config config;
  config.device = testing::reference_device();
  config.environment.line_damping = 1.3e7;
  config.environment.excess_fraction = 0.07;
  config.environment.off_state_damping = 1.1e5;
  const Config loaded = load_config(write_config(config));
  CHECK(loaded == config);
}

TEST_CASE("device JSON uses unit-suffixed field names") {
  const std::string text = write_device_params(testing::reference_device());
  for (const char* key : {"R_T_kohm", "T_N_K", "gamma_D", "Z_r_ohm", "C_c_fF",
                          "C_m_fF", "f0_GHz", "Delta_ueV"}) {
    CAPTURE(key);
    CHECK(text.find(key) != std::string::npos);
  }
  const DeviceParams device = load_device_params(text);
  CHECK(device == testing::reference_device());
}

TEST_CASE("unit conversion factors are exact round trips") {
  const DeviceParams device = testing::reference_device();
  CHECK(device.tunnel_resistance == 14000.0);
  CHECK(device.mode_frequency == 8.683e9);
  // Non-representable factors (1e-15, 1.602...e-25) still round-trip through
  // the shortest-serialization JSON path bit-exactly, checked above.
  CHECK(device.coupling_capacitance / constants::femto_farad ==
        doctest::Approx(840.0).epsilon(1e-15));
}

TEST_CASE("flat and nested configuration documents are equivalent") {
  const std::string nested = R"({
    "device": {"R_T_kohm": 14.0, "T_N_K": 0.17, "gamma_D": 4.0e-4,
               "Z_r_ohm": 35.0, "C_c_fF": 840.0, "C_m_fF": 5.0,
               "f0_GHz": 8.683, "Delta_ueV": 215.0}
  })";
  const std::string flat = R"({
    "R_T_kohm": 14.0, "T_N_K": 0.17, "gamma_D": 4.0e-4,
    "Z_r_ohm": 35.0, "C_c_fF": 840.0, "C_m_fF": 5.0,
    "f0_GHz": 8.683, "Delta_ueV": 215.0
  })";
  const Config a = load_config(nested);
  const Config b = load_config(flat);
  CHECK(a.device == b.device);
  CHECK(a.device == testing::reference_device());
  CHECK(a.environment == EnvironmentRates{});
}

TEST_CASE("validation rejects out-of-domain device parameters") {
  DeviceParams device = testing::reference_device();
  SUBCASE("negative resistance") {
    device.tunnel_resistance = -1.0;
    CHECK_THROWS_AS(validate(device), ConfigError);
  }
  SUBCASE("zero temperature") {
    device.electron_temperature = 0.0;
    CHECK_THROWS_AS(validate(device), ConfigError);
  }
  SUBCASE("broadening parameter at one") {
    device.dynes_parameter = 1.0;
    CHECK_THROWS_AS_MESSAGE(validate(device), ConfigError,
                            "gamma_D must be below 1");
  }
  SUBCASE("photon energy above the gap") {
    device.mode_frequency = 1.0e12;  // h*f0 ~ 4100 ueV >> Delta
    CHECK_THROWS_AS_MESSAGE(validate(device), ConfigError,
                            "photon energy exceeds gap (h*f_0 >= Delta)");
  }
}

TEST_CASE("validation rejects out-of-domain environment parameters") {
  EnvironmentRates env;
  SUBCASE("zero line damping") {
    env.line_damping = 0.0;
    CHECK_THROWS_AS(validate(env), ConfigError);
  }
  SUBCASE("excess fraction at one") {
    env.excess_fraction = 1.0;
    CHECK_THROWS_AS(validate(env), ConfigError);
  }
  SUBCASE("negative off-state damping") {
    env.off_state_damping = -1.0;
    CHECK_THROWS_AS(validate(env), ConfigError);
  }
}

TEST_CASE("malformed JSON raises ConfigError, not a json exception") {
  CHECK_THROWS_AS(load_config("{ not json"), ConfigError);
  CHECK_THROWS_AS(load_config(R"({"device": {"R_T_kohm": "fast"}})"),
                  ConfigError);
  CHECK_THROWS_AS(load_config(R"({"device": {"R_T_kohm": 14.0}})"),
                  ConfigError);  // missing fields
  CHECK_THROWS_AS(load_config_file("/nonexistent/path.json"), ConfigError);
}

TEST_CASE("environment defaults apply when the block is absent") {
  Config config;
  config.device = testing::reference_device();
  const Config loaded = load_config(write_device_params(config.device));
  CHECK(loaded.environment.line_damping == 1.2e7);
  CHECK(loaded.environment.excess_fraction == 0.10);
  CHECK(loaded.environment.off_state_damping == 0.0);
  CHECK(loaded.environment.background() == doctest::Approx(1.32e7));
}

TEST_CASE("params hash is stable and sensitive to every field") {
  const DeviceParams device = testing::reference_device();
  // Frozen fingerprint: changing the canonical serialization is a breaking
  // change for every stored manifest.
  CHECK(params_hash(device) == 80975151475933304ull);
  CHECK(params_hash(device) == params_hash(device));

  auto mutate = [&](auto member) {
    DeviceParams copy = device;
    copy.*member *= 1.0 + 1e-12;
    return params_hash(copy);
  };
  CHECK(mutate(&DeviceParams::tunnel_resistance) != params_hash(device));
  CHECK(mutate(&DeviceParams::electron_temperature) != params_hash(device));
  CHECK(mutate(&DeviceParams::dynes_parameter) != params_hash(device));
  CHECK(mutate(&DeviceParams::resonator_impedance) != params_hash(device));
  CHECK(mutate(&DeviceParams::coupling_capacitance) != params_hash(device));
  CHECK(mutate(&DeviceParams::junction_capacitance) != params_hash(device));
  CHECK(mutate(&DeviceParams::mode_frequency) != params_hash(device));
  CHECK(mutate(&DeviceParams::gap_energy) != params_hash(device));
}
