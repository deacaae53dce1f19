#pragma once

#include <optional>
#include <string>

#include "tanklab/errors.hpp"
#include "tanklab/fuzzy.hpp"
#include "tanklab/metrics.hpp"
#include "tanklab/pid.hpp"
#include "tanklab/plant.hpp"
#include "tanklab/sim.hpp"

namespace tanklab {

/// Reference PID tuning for the stock rig (ultimate-cycle tuning at
/// ku = 142, tu = 11.5 s).
inline constexpr PidGains kReferenceGains{83.5, 14.5, 120.0};

/// Fuzzy-scheduler settings as they appear in a config file.  Unset members
/// fall back to the stock scheduler built from the PID reference gains; the
/// scales default to e_scale = 1/|step amplitude| and
/// ce_scale = tc/|step amplitude|.
struct FuzzySettings {
  std::optional<double> e_scale;
  std::optional<double> ce_scale;
  int defuzz_resolution = 1001;
  std::optional<LinguisticVariable> e_var;
  std::optional<LinguisticVariable> ce_var;
  std::optional<LinguisticVariable> kp_var;
  std::optional<LinguisticVariable> ki_var;
  std::optional<LinguisticVariable> kd_var;
  RuleTable rules = RuleTable::defaults();
};

/// Everything the CLI reads from a config file, pre-populated with working
/// defaults so an absent file or section still runs the stock experiments.
struct Config {
  int schema_version = 1;
  TankParams plant;
  double h1_op = 22.0;  ///< linearization / tuning operating point
  double h2_op = 9.0;
  PidGains pid = kReferenceGains;
  FuzzySettings fuzzy;
  Scenario scenario;               ///< what `simulate` runs
  Scenario step_scenario;          ///< `compare`, setpoint step
  Scenario disturbance_scenario;   ///< `compare`, load disturbance
  double settle_band_pct = 2.0;
  std::string trace_out = "trace.csv";
  std::string report_out = "report.txt";
  /// Whether the file actually carried these sections (strict mode refuses
  /// to substitute defaults for a controller whose section is absent).
  bool pid_present = false;
  bool fuzzy_present = false;
};

/// The stock configuration: Config{} with the calibrated default scenarios
/// (6 cm setpoint step from rest; the same step plus a -40 cm^3/s load drop
/// into tank 2 at t = 60 s).
Config default_config();

/// Parse and validate a JSON config document.  Unknown keys and
/// wrongly-typed values raise ConfigError naming the offending key; absent
/// sections keep their defaults.
Config parse_config_json(const std::string& text);

/// Read and parse a config file; throws ConfigError when the file cannot be
/// read.
Config load_config(const std::string& path);

/// Serialize a config to pretty-printed JSON (the inverse of
/// parse_config_json for everything it carries; unset fuzzy overrides are
/// omitted).
std::string config_to_json(const Config& config);

/// Build the fuzzy scheduler a scenario will use: explicit settings win,
/// everything else comes from the stock scheduler for cfg.pid with scales
/// derived from the scenario's setpoint step.
FuzzyScheduler build_scheduler(const Config& cfg, const Scenario& scenario);

}  // namespace tanklab
