#include "tanklab/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string_view>

#include <json.hpp>

namespace tanklab {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& key, const std::string& msg) {
  throw ConfigError(key, msg);
}

std::string join(const std::string& base, std::string_view key) {
  return base.empty() ? std::string(key) : base + "." + std::string(key);
}

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
}

void reject_unknown_keys(const json& obj, const std::string& path,
                         std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      fail(join(path, key), "unknown key");
    }
  }
}

double as_double(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "expected a finite number");
  return v;
}

int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected a boolean");
  return j.get<bool>();
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

void parse_plant(const json& j, const std::string& path, TankParams& p) {
  require_object(j, path);
  reject_unknown_keys(
      j, path, {"a1", "a2", "alpha1", "alpha2", "alpha3", "tc", "q_max"});
  if (auto it = j.find("a1"); it != j.end()) p.a1 = as_double(*it, join(path, "a1"));
  if (auto it = j.find("a2"); it != j.end()) p.a2 = as_double(*it, join(path, "a2"));
  if (auto it = j.find("alpha1"); it != j.end()) p.alpha1 = as_double(*it, join(path, "alpha1"));
  if (auto it = j.find("alpha2"); it != j.end()) p.alpha2 = as_double(*it, join(path, "alpha2"));
  if (auto it = j.find("alpha3"); it != j.end()) p.alpha3 = as_double(*it, join(path, "alpha3"));
  if (auto it = j.find("tc"); it != j.end()) p.tc = as_double(*it, join(path, "tc"));
  if (auto it = j.find("q_max"); it != j.end()) p.q_max = as_double(*it, join(path, "q_max"));
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
}

void parse_operating_point(const json& j, const std::string& path, double& h1,
                           double& h2) {
  require_object(j, path);
  reject_unknown_keys(j, path, {"h1", "h2"});
  if (auto it = j.find("h1"); it != j.end()) h1 = as_double(*it, join(path, "h1"));
  if (auto it = j.find("h2"); it != j.end()) h2 = as_double(*it, join(path, "h2"));
  if (!(h2 > 0.0) || !(h1 > h2)) {
    fail(path, "operating point requires h1 > h2 > 0");
  }
}

void parse_pid(const json& j, const std::string& path, PidGains& g) {
  require_object(j, path);
  reject_unknown_keys(j, path, {"kp", "ki", "kd"});
  if (auto it = j.find("kp"); it != j.end()) g.kp = as_double(*it, join(path, "kp"));
  if (auto it = j.find("ki"); it != j.end()) g.ki = as_double(*it, join(path, "ki"));
  if (auto it = j.find("kd"); it != j.end()) g.kd = as_double(*it, join(path, "kd"));
  try {
    g.validate();
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
}

std::vector<SchedulePoint> parse_schedule(const json& j,
                                          const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of [time, value] pairs");
  std::vector<SchedulePoint> points;
  points.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto entry_path = path + "[" + std::to_string(i) + "]";
    const auto& entry = j[i];
    if (!entry.is_array() || entry.size() != 2) {
      fail(entry_path, "expected a [time, value] pair");
    }
    points.push_back({as_double(entry[0], entry_path + "[0]"),
                      as_double(entry[1], entry_path + "[1]")});
  }
  return points;
}

PlantKind parse_plant_kind(const json& j, const std::string& path) {
  const auto s = as_string(j, path);
  if (s == "nonlinear") return PlantKind::nonlinear;
  if (s == "linear") return PlantKind::linear;
  fail(path, "expected \"nonlinear\" or \"linear\"");
}

ControllerKind parse_controller_kind(const json& j, const std::string& path) {
  const auto s = as_string(j, path);
  if (s == "none") return ControllerKind::none;
  if (s == "pid") return ControllerKind::pid;
  if (s == "fuzzy-pid") return ControllerKind::fuzzy_pid;
  fail(path, "expected \"none\", \"pid\" or \"fuzzy-pid\"");
}

void parse_scenario(const json& j, const std::string& path, Scenario& sc) {
  require_object(j, path);
  reject_unknown_keys(j, path,
                      {"duration", "dt", "plant", "controller", "initial",
                       "setpoints", "disturbances", "inflows",
                       "actuator_enabled", "operating_point",
                       "initial_integral"});
  if (auto it = j.find("duration"); it != j.end()) {
    sc.duration = as_double(*it, join(path, "duration"));
  }
  if (auto it = j.find("dt"); it != j.end()) {
    sc.dt = as_double(*it, join(path, "dt"));
  }
  if (auto it = j.find("plant"); it != j.end()) {
    sc.plant_kind = parse_plant_kind(*it, join(path, "plant"));
  }
  if (auto it = j.find("controller"); it != j.end()) {
    sc.controller_kind = parse_controller_kind(*it, join(path, "controller"));
  }
  if (auto it = j.find("initial"); it != j.end()) {
    const auto ipath = join(path, "initial");
    require_object(*it, ipath);
    reject_unknown_keys(*it, ipath, {"h1", "h2", "q_actuator"});
    if (auto f = it->find("h1"); f != it->end()) {
      sc.initial_state.h1 = as_double(*f, join(ipath, "h1"));
    }
    if (auto f = it->find("h2"); f != it->end()) {
      sc.initial_state.h2 = as_double(*f, join(ipath, "h2"));
    }
    if (auto f = it->find("q_actuator"); f != it->end()) {
      sc.initial_state.q_actuator = as_double(*f, join(ipath, "q_actuator"));
    }
  }
  if (auto it = j.find("setpoints"); it != j.end()) {
    sc.setpoints = parse_schedule(*it, join(path, "setpoints"));
  }
  if (auto it = j.find("disturbances"); it != j.end()) {
    sc.disturbances = parse_schedule(*it, join(path, "disturbances"));
  }
  if (auto it = j.find("inflows"); it != j.end()) {
    sc.inflows = parse_schedule(*it, join(path, "inflows"));
  }
  if (auto it = j.find("actuator_enabled"); it != j.end()) {
    sc.actuator_enabled = as_bool(*it, join(path, "actuator_enabled"));
  }
  if (auto it = j.find("operating_point"); it != j.end()) {
    parse_operating_point(*it, join(path, "operating_point"), sc.h1_op,
                          sc.h2_op);
  }
  if (auto it = j.find("initial_integral"); it != j.end()) {
    sc.initial_integral = as_double(*it, join(path, "initial_integral"));
  }
  try {
    sc.validate();
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
}

LinguisticVariable parse_variable(const json& j, const std::string& path,
                                  const std::string& name) {
  require_object(j, path);
  reject_unknown_keys(j, path, {"universe", "terms"});
  LinguisticVariable v;
  v.name = name;
  const auto u = j.find("universe");
  if (u == j.end() || !u->is_array() || u->size() != 2) {
    fail(join(path, "universe"), "expected [lo, hi]");
  }
  v.lo = as_double((*u)[0], join(path, "universe[0]"));
  v.hi = as_double((*u)[1], join(path, "universe[1]"));
  const auto terms = j.find("terms");
  if (terms == j.end() || !terms->is_array() ||
      terms->size() != static_cast<std::size_t>(kTermCount)) {
    fail(join(path, "terms"),
         "expected " + std::to_string(kTermCount) +
             " [label, left, peak, right] entries");
  }
  for (int i = 0; i < kTermCount; ++i) {
    const auto tpath = join(path, "terms[" + std::to_string(i) + "]");
    const auto& term = (*terms)[i];
    if (!term.is_array() || term.size() != 4) {
      fail(tpath, "expected [label, left, peak, right]");
    }
    v.terms[i].first = as_string(term[0], tpath + "[0]");
    v.terms[i].second.left = as_double(term[1], tpath + "[1]");
    v.terms[i].second.peak = as_double(term[2], tpath + "[2]");
    v.terms[i].second.right = as_double(term[3], tpath + "[3]");
  }
  try {
    v.validate();
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
  return v;
}

void parse_fuzzy(const json& j, const std::string& path, FuzzySettings& f) {
  require_object(j, path);
  reject_unknown_keys(j, path, {"e_scale", "ce_scale", "defuzz_resolution",
                                "variables", "rules"});
  if (auto it = j.find("e_scale"); it != j.end()) {
    f.e_scale = as_double(*it, join(path, "e_scale"));
    if (!(*f.e_scale > 0.0)) fail(join(path, "e_scale"), "must be positive");
  }
  if (auto it = j.find("ce_scale"); it != j.end()) {
    f.ce_scale = as_double(*it, join(path, "ce_scale"));
    if (!(*f.ce_scale > 0.0)) fail(join(path, "ce_scale"), "must be positive");
  }
  if (auto it = j.find("defuzz_resolution"); it != j.end()) {
    f.defuzz_resolution = as_int(*it, join(path, "defuzz_resolution"));
    if (f.defuzz_resolution < 101) {
      fail(join(path, "defuzz_resolution"), "must be >= 101");
    }
  }
  if (auto it = j.find("variables"); it != j.end()) {
    const auto vpath = join(path, "variables");
    require_object(*it, vpath);
    reject_unknown_keys(*it, vpath, {"e", "ce", "kp", "ki", "kd"});
    const auto grab = [&](const char* key,
                          std::optional<LinguisticVariable>& slot) {
      if (auto v = it->find(key); v != it->end()) {
        slot = parse_variable(*v, join(vpath, key), key);
      }
    };
    grab("e", f.e_var);
    grab("ce", f.ce_var);
    grab("kp", f.kp_var);
    grab("ki", f.ki_var);
    grab("kd", f.kd_var);
  }
  if (auto it = j.find("rules"); it != j.end()) {
    const auto rpath = join(path, "rules");
    // Consequent labels resolve against the output label set, which custom
    // output variables may redefine (they must agree with each other).
    std::array<std::string, kTermCount> labels = {"S", "MS", "M", "MB", "B"};
    if (f.kp_var) {
      for (int i = 0; i < kTermCount; ++i) labels[i] = f.kp_var->terms[i].first;
    }
    if (!it->is_array() || it->size() != static_cast<std::size_t>(kTermCount)) {
      fail(rpath, "expected a 5x5 grid of output labels");
    }
    for (int i = 0; i < kTermCount; ++i) {
      const auto row_path = rpath + "[" + std::to_string(i) + "]";
      const auto& row = (*it)[i];
      if (!row.is_array() || row.size() != static_cast<std::size_t>(kTermCount)) {
        fail(row_path, "expected a row of 5 output labels");
      }
      for (int k = 0; k < kTermCount; ++k) {
        const auto cell = as_string(row[k], row_path + "[" + std::to_string(k) + "]");
        const auto pos = std::find(labels.begin(), labels.end(), cell);
        if (pos == labels.end()) {
          fail(row_path + "[" + std::to_string(k) + "]",
               "unknown output label '" + cell + "'");
        }
        f.rules.cells[i][k] =
            static_cast<std::uint8_t>(pos - labels.begin());
      }
    }
  }
}

void parse_output(const json& j, const std::string& path, Config& cfg) {
  require_object(j, path);
  reject_unknown_keys(j, path, {"trace", "report"});
  if (auto it = j.find("trace"); it != j.end()) {
    cfg.trace_out = as_string(*it, join(path, "trace"));
  }
  if (auto it = j.find("report"); it != j.end()) {
    cfg.report_out = as_string(*it, join(path, "report"));
  }
}

json schedule_to_json(const std::vector<SchedulePoint>& points) {
  json arr = json::array();
  for (const auto& p : points) arr.push_back({p.time, p.value});
  return arr;
}

const char* plant_kind_name(PlantKind k) {
  return k == PlantKind::linear ? "linear" : "nonlinear";
}

const char* controller_kind_name(ControllerKind k) {
  switch (k) {
    case ControllerKind::none: return "none";
    case ControllerKind::pid: return "pid";
    case ControllerKind::fuzzy_pid: return "fuzzy-pid";
  }
  return "pid";
}

ordered_json scenario_to_json(const Scenario& sc) {
  ordered_json j;
  j["duration"] = sc.duration;
  j["dt"] = sc.dt;
  j["plant"] = plant_kind_name(sc.plant_kind);
  j["controller"] = controller_kind_name(sc.controller_kind);
  j["initial"] = {{"h1", sc.initial_state.h1},
                  {"h2", sc.initial_state.h2},
                  {"q_actuator", sc.initial_state.q_actuator}};
  j["setpoints"] = schedule_to_json(sc.setpoints);
  j["disturbances"] = schedule_to_json(sc.disturbances);
  j["inflows"] = schedule_to_json(sc.inflows);
  j["actuator_enabled"] = sc.actuator_enabled;
  j["operating_point"] = {{"h1", sc.h1_op}, {"h2", sc.h2_op}};
  j["initial_integral"] = sc.initial_integral;
  return j;
}

ordered_json variable_to_json(const LinguisticVariable& v) {
  ordered_json j;
  j["universe"] = {v.lo, v.hi};
  ordered_json terms = ordered_json::array();
  for (const auto& [label, mf] : v.terms) {
    terms.push_back({label, mf.left, mf.peak, mf.right});
  }
  j["terms"] = terms;
  return j;
}

}  // namespace

Config default_config() {
  Config cfg;
  Scenario step;
  step.duration = 100.0;
  step.dt = 0.01;
  step.plant_kind = PlantKind::nonlinear;
  step.controller_kind = ControllerKind::pid;
  step.setpoints = {{0.0, 6.0}};
  cfg.scenario = step;
  cfg.step_scenario = step;
  Scenario disturbance = step;
  disturbance.duration = 150.0;
  disturbance.disturbances = {{60.0, -40.0}};
  cfg.disturbance_scenario = disturbance;
  return cfg;
}

Config parse_config_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail("<document>", e.what());
  }
  require_object(doc, "<document>");
  reject_unknown_keys(doc, "",
                      {"schema_version", "plant", "operating_point", "pid",
                       "fuzzy", "scenario", "step_scenario",
                       "disturbance_scenario", "settle_band_pct", "output"});

  Config cfg = default_config();
  if (auto it = doc.find("schema_version"); it != doc.end()) {
    cfg.schema_version = as_int(*it, "schema_version");
  }
  if (cfg.schema_version != 1) {
    fail("schema_version", "unsupported version " +
                               std::to_string(cfg.schema_version) +
                               " (this build reads version 1)");
  }
  if (auto it = doc.find("plant"); it != doc.end()) {
    parse_plant(*it, "plant", cfg.plant);
  }
  // Parse the top-level operating point before the scenarios so it provides
  // their default.
  if (auto it = doc.find("operating_point"); it != doc.end()) {
    parse_operating_point(*it, "operating_point", cfg.h1_op, cfg.h2_op);
  }
  cfg.scenario.h1_op = cfg.h1_op;
  cfg.scenario.h2_op = cfg.h2_op;
  cfg.step_scenario.h1_op = cfg.h1_op;
  cfg.step_scenario.h2_op = cfg.h2_op;
  cfg.disturbance_scenario.h1_op = cfg.h1_op;
  cfg.disturbance_scenario.h2_op = cfg.h2_op;

  if (auto it = doc.find("pid"); it != doc.end()) {
    cfg.pid_present = true;
    parse_pid(*it, "pid", cfg.pid);
  }
  if (auto it = doc.find("fuzzy"); it != doc.end()) {
    cfg.fuzzy_present = true;
    parse_fuzzy(*it, "fuzzy", cfg.fuzzy);
  }
  if (auto it = doc.find("scenario"); it != doc.end()) {
    parse_scenario(*it, "scenario", cfg.scenario);
  }
  if (auto it = doc.find("step_scenario"); it != doc.end()) {
    parse_scenario(*it, "step_scenario", cfg.step_scenario);
  }
  if (auto it = doc.find("disturbance_scenario"); it != doc.end()) {
    parse_scenario(*it, "disturbance_scenario", cfg.disturbance_scenario);
  }
  if (auto it = doc.find("settle_band_pct"); it != doc.end()) {
    cfg.settle_band_pct = as_double(*it, "settle_band_pct");
    if (!(cfg.settle_band_pct > 0.0)) {
      fail("settle_band_pct", "must be positive");
    }
  }
  if (auto it = doc.find("output"); it != doc.end()) {
    parse_output(*it, "output", cfg);
  }
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("<file>", "cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_json(buffer.str());
}

std::string config_to_json(const Config& config) {
  ordered_json j;
  j["schema_version"] = config.schema_version;
  j["plant"] = {{"a1", config.plant.a1},     {"a2", config.plant.a2},
                {"alpha1", config.plant.alpha1}, {"alpha2", config.plant.alpha2},
                {"alpha3", config.plant.alpha3}, {"tc", config.plant.tc},
                {"q_max", config.plant.q_max}};
  j["operating_point"] = {{"h1", config.h1_op}, {"h2", config.h2_op}};
  j["pid"] = {{"kp", config.pid.kp}, {"ki", config.pid.ki}, {"kd", config.pid.kd}};

  ordered_json fuzzy;
  if (config.fuzzy.e_scale) fuzzy["e_scale"] = *config.fuzzy.e_scale;
  if (config.fuzzy.ce_scale) fuzzy["ce_scale"] = *config.fuzzy.ce_scale;
  fuzzy["defuzz_resolution"] = config.fuzzy.defuzz_resolution;
  ordered_json variables;
  if (config.fuzzy.e_var) variables["e"] = variable_to_json(*config.fuzzy.e_var);
  if (config.fuzzy.ce_var) variables["ce"] = variable_to_json(*config.fuzzy.ce_var);
  if (config.fuzzy.kp_var) variables["kp"] = variable_to_json(*config.fuzzy.kp_var);
  if (config.fuzzy.ki_var) variables["ki"] = variable_to_json(*config.fuzzy.ki_var);
  if (config.fuzzy.kd_var) variables["kd"] = variable_to_json(*config.fuzzy.kd_var);
  if (!variables.empty()) fuzzy["variables"] = variables;
  std::array<std::string, kTermCount> labels = {"S", "MS", "M", "MB", "B"};
  if (config.fuzzy.kp_var) {
    for (int i = 0; i < kTermCount; ++i) {
      labels[i] = config.fuzzy.kp_var->terms[i].first;
    }
  }
  ordered_json rules = ordered_json::array();
  for (int i = 0; i < kTermCount; ++i) {
    ordered_json row = ordered_json::array();
    for (int k = 0; k < kTermCount; ++k) {
      row.push_back(labels[config.fuzzy.rules.cells[i][k]]);
    }
    rules.push_back(row);
  }
  fuzzy["rules"] = rules;
  j["fuzzy"] = fuzzy;

  j["scenario"] = scenario_to_json(config.scenario);
  j["step_scenario"] = scenario_to_json(config.step_scenario);
  j["disturbance_scenario"] = scenario_to_json(config.disturbance_scenario);
  j["settle_band_pct"] = config.settle_band_pct;
  j["output"] = {{"trace", config.trace_out}, {"report", config.report_out}};
  return j.dump(2) + "\n";
}

FuzzyScheduler build_scheduler(const Config& cfg, const Scenario& scenario) {
  double amplitude = 1.0;
  if (!scenario.setpoints.empty()) {
    const StepSpec step = scenario_step(scenario);
    if (std::abs(step.amplitude) > 1e-12) amplitude = std::abs(step.amplitude);
  }
  FuzzyScheduler s;
  s.e_scale = cfg.fuzzy.e_scale.value_or(1.0 / amplitude);
  // The error-change input is normalized over the actuator time constant
  // (one second when the actuator is degenerate).
  const double tc = cfg.plant.tc > 0.0 ? cfg.plant.tc : 1.0;
  s.ce_scale = cfg.fuzzy.ce_scale.value_or(tc / amplitude);
  s.defuzz_resolution = cfg.fuzzy.defuzz_resolution;
  s.rules = cfg.fuzzy.rules;
  s.e_var = cfg.fuzzy.e_var ? *cfg.fuzzy.e_var : default_input_variable("e");
  s.ce_var =
      cfg.fuzzy.ce_var ? *cfg.fuzzy.ce_var : default_input_variable("ce");
  s.kp_var = cfg.fuzzy.kp_var ? *cfg.fuzzy.kp_var
                              : default_output_variable("kp", cfg.pid.kp);
  s.ki_var = cfg.fuzzy.ki_var ? *cfg.fuzzy.ki_var
                              : default_output_variable("ki", cfg.pid.ki);
  s.kd_var = cfg.fuzzy.kd_var ? *cfg.fuzzy.kd_var
                              : default_output_variable("kd", cfg.pid.kd);
  s.validate();
  return s;
}

}  // namespace tanklab
