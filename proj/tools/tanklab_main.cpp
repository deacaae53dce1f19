// tanklab: coupled-tank level-control experiments from the command line.
//
// Subcommands:
//   simulate   run one scenario and write the trace as CSV
//   tune-zn    ultimate-gain search on the linearized plant + Z-N gains
//   compare    step + disturbance scenarios under PID and fuzzy-PID
//   metrics    step-response figures for an existing trace CSV

#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "tanklab/config.hpp"
#include "tanklab/csv.hpp"
#include "tanklab/errors.hpp"
#include "tanklab/metrics.hpp"
#include "tanklab/pid.hpp"
#include "tanklab/sim.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNonFinite = 3;
constexpr int kExitNoUltimateGain = 4;

struct CommonFlags {
  std::string config_path;
  bool strict = false;
};

tanklab::Config load(const CommonFlags& flags) {
  if (flags.config_path.empty()) return tanklab::default_config();
  return tanklab::load_config(flags.config_path);
}

// Strict mode refuses to fall back to built-in defaults for the section the
// selected controller needs.
void check_strict(const tanklab::Config& cfg, bool strict,
                  tanklab::ControllerKind controller) {
  if (!strict) return;
  if (controller == tanklab::ControllerKind::pid && !cfg.pid_present) {
    throw tanklab::ConfigError("pid",
                               "section required in strict mode but missing");
  }
  if (controller == tanklab::ControllerKind::fuzzy_pid &&
      !cfg.fuzzy_present) {
    throw tanklab::ConfigError("fuzzy",
                               "section required in strict mode but missing");
  }
}

void ensure_parent_dir(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
}

tanklab::Trace run_with_controller(const tanklab::Config& cfg,
                                   const tanklab::Scenario& scenario) {
  const tanklab::PidGains* pid = nullptr;
  std::optional<tanklab::FuzzyScheduler> scheduler;
  if (scenario.controller_kind == tanklab::ControllerKind::pid) {
    pid = &cfg.pid;
  } else if (scenario.controller_kind == tanklab::ControllerKind::fuzzy_pid) {
    scheduler = tanklab::build_scheduler(cfg, scenario);
  }
  return tanklab::run_scenario(scenario, cfg.plant, pid,
                               scheduler ? &*scheduler : nullptr);
}

int cmd_simulate(const CommonFlags& flags, const std::string& plant_flag,
                 const std::string& controller_flag, std::string out,
                 std::optional<double> dt, std::optional<double> duration) {
  tanklab::Config cfg = load(flags);
  tanklab::Scenario scenario = cfg.scenario;
  if (!plant_flag.empty()) {
    scenario.plant_kind = plant_flag == "linear"
                              ? tanklab::PlantKind::linear
                              : tanklab::PlantKind::nonlinear;
  }
  if (!controller_flag.empty()) {
    if (controller_flag == "none") {
      scenario.controller_kind = tanklab::ControllerKind::none;
    } else if (controller_flag == "pid") {
      scenario.controller_kind = tanklab::ControllerKind::pid;
    } else {
      scenario.controller_kind = tanklab::ControllerKind::fuzzy_pid;
    }
  }
  if (dt) scenario.dt = *dt;
  if (duration) scenario.duration = *duration;
  scenario.validate();
  check_strict(cfg, flags.strict, scenario.controller_kind);
  if (out.empty()) out = cfg.trace_out;

  const tanklab::Trace trace = run_with_controller(cfg, scenario);
  ensure_parent_dir(out);
  tanklab::write_trace_csv_file(trace, out);
  std::cout << "wrote " << trace.rows.size() << " rows to " << out << '\n';
  return kExitOk;
}

int cmd_tune_zn(const CommonFlags& flags, std::optional<double> ku_override,
                std::optional<double> tu_override) {
  tanklab::Config cfg = load(flags);

  double ku = 0.0;
  double tu = 0.0;
  if (ku_override && tu_override) {
    ku = *ku_override;
    tu = *tu_override;
    std::printf("ultimate point (override): ku=%.6g  tu=%.6g s\n", ku, tu);
  } else if (ku_override || tu_override) {
    throw tanklab::ConfigError("--ku/--tu",
                               "both overrides must be given together");
  } else {
    const tanklab::LinearModel model =
        tanklab::linearize(cfg.plant, cfg.h1_op, cfg.h2_op);
    const tanklab::UltimateGainResult r =
        tanklab::find_ultimate_gain(cfg.plant, model);
    ku = r.ku;
    tu = r.tu;
    std::printf("operating point: h1=%.6g cm  h2=%.6g cm\n", cfg.h1_op,
                cfg.h2_op);
    std::printf("ultimate point (search): ku=%.6g  tu=%.6g s\n", ku, tu);
  }

  const tanklab::PidGains g = tanklab::zn_from_ultimate(ku, tu);
  std::printf("z-n gains:        kp=%.6g  ki=%.6g  kd=%.6g\n", g.kp, g.ki,
              g.kd);
  std::printf("reference tuning: kp=%.6g  ki=%.6g  kd=%.6g\n",
              tanklab::kReferenceGains.kp, tanklab::kReferenceGains.ki,
              tanklab::kReferenceGains.kd);
  return kExitOk;
}

int cmd_compare(const CommonFlags& flags, std::string out,
                std::optional<double> settle_band) {
  tanklab::Config cfg = load(flags);
  if (out.empty()) out = cfg.report_out;
  const double band = settle_band.value_or(cfg.settle_band_pct);
  if (!(band > 0.0)) {
    throw tanklab::ConfigError("settle_band_pct", "must be positive");
  }
  check_strict(cfg, flags.strict, tanklab::ControllerKind::pid);
  check_strict(cfg, flags.strict, tanklab::ControllerKind::fuzzy_pid);

  ensure_parent_dir(out);
  const std::filesystem::path dir = std::filesystem::path(out).parent_path();

  struct Run {
    const char* scenario_name;
    const tanklab::Scenario* base;
    const char* controller_name;
    tanklab::ControllerKind kind;
  };
  const Run runs[] = {
      {"step", &cfg.step_scenario, "PID", tanklab::ControllerKind::pid},
      {"step", &cfg.step_scenario, "PIDFLC",
       tanklab::ControllerKind::fuzzy_pid},
      {"disturbance", &cfg.disturbance_scenario, "PID",
       tanklab::ControllerKind::pid},
      {"disturbance", &cfg.disturbance_scenario, "PIDFLC",
       tanklab::ControllerKind::fuzzy_pid},
  };

  std::vector<std::pair<std::string, tanklab::Trace>> step_traces;
  std::vector<std::pair<std::string, tanklab::Trace>> disturbance_traces;
  for (const Run& run : runs) {
    tanklab::Scenario scenario = *run.base;
    scenario.controller_kind = run.kind;
    tanklab::Trace trace = run_with_controller(cfg, scenario);
    const auto csv_name = std::string(run.scenario_name) + "_" +
                          (run.kind == tanklab::ControllerKind::pid
                               ? "pid"
                               : "fuzzy_pid") +
                          ".csv";
    tanklab::write_trace_csv_file(trace, (dir / csv_name).string());
    auto& bucket = std::string(run.scenario_name) == "step"
                       ? step_traces
                       : disturbance_traces;
    bucket.emplace_back(run.controller_name, std::move(trace));
  }

  const tanklab::ComparisonReport step_report =
      tanklab::compare(step_traces, cfg.step_scenario, band);
  const tanklab::ComparisonReport disturbance_report =
      tanklab::compare(disturbance_traces, cfg.disturbance_scenario, band);

  std::ostringstream report;
  report << "setpoint step scenario\n"
         << "----------------------\n"
         << step_report.to_text() << '\n'
         << "disturbance scenario\n"
         << "--------------------\n"
         << disturbance_report.to_text() << '\n';

  // Observation, not a verdict: whether each controller returned to the
  // reference after the load change (tail error under 1% of the step).
  const tanklab::StepSpec step = tanklab::scenario_step(cfg.disturbance_scenario);
  report << "post-disturbance recovery (tail error vs 1% of step amplitude):\n";
  for (const auto& row : disturbance_report.rows) {
    report << "  " << row.name << ": ";
    if (row.metrics) {
      const double sse = row.metrics->steady_state_error;
      const bool recovered = sse < 0.01 * std::abs(step.amplitude);
      report << (recovered ? "returned to the reference" : "did not return")
             << " (sse " << tanklab::format_double(sse) << " cm)\n";
    } else {
      report << "analysis failed: " << row.note << '\n';
    }
  }

  std::ofstream file(out);
  if (!file) {
    throw std::runtime_error("cannot open " + out + " for writing");
  }
  file << report.str();
  file.flush();
  if (!file) throw std::runtime_error("failed writing " + out);

  std::cout << report.str();
  std::cout << "wrote report to " << out << '\n';
  return kExitOk;
}

int cmd_metrics(const std::string& trace_path, std::optional<double> step_time,
                std::optional<double> step_target,
                std::optional<double> settle_band) {
  const tanklab::Trace trace = tanklab::read_trace_csv_file(trace_path);
  if (trace.rows.empty()) throw tanklab::NoStepFound("trace has no rows");

  // Default step: the last change in the setpoint column (or the first row
  // for a constant setpoint).
  double time = trace.rows.front().t;
  double target = trace.rows.front().setpoint;
  for (std::size_t i = 1; i < trace.rows.size(); ++i) {
    if (trace.rows[i].setpoint != trace.rows[i - 1].setpoint) {
      time = trace.rows[i].t;
      target = trace.rows[i].setpoint;
    }
  }
  if (step_time) time = *step_time;
  if (step_target) target = *step_target;

  const tanklab::StepMetrics m = tanklab::step_metrics(
      trace, time, target, settle_band.value_or(2.0));
  std::printf("step: t=%.6g s -> target %.6g cm\n", time, target);
  std::printf("overshoot:          %.4g %%\n", m.overshoot_pct);
  if (m.rise_time) {
    std::printf("rise time (10-90%%): %.6g s\n", *m.rise_time);
  } else {
    std::printf("rise time (10-90%%): n/a\n");
  }
  if (m.settling_time) {
    std::printf("settling time:      %.6g s\n", *m.settling_time);
  } else {
    std::printf("settling time:      n/a\n");
  }
  std::printf("steady-state error: %.6g cm\n", m.steady_state_error);
  std::printf("final value:        %.6g cm\n", m.final_value);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coupled-tank level-control laboratory"};
  app.require_subcommand(1);

  CommonFlags flags;

  auto* simulate = app.add_subcommand("simulate", "run a scenario, write CSV");
  std::string sim_plant, sim_controller, sim_out;
  std::optional<double> sim_dt, sim_duration;
  simulate->add_option("--config", flags.config_path, "config file (JSON)");
  simulate->add_flag("--strict", flags.strict,
                     "fail instead of substituting defaults");
  simulate->add_option("--plant", sim_plant, "plant model")
      ->check(CLI::IsMember({"nonlinear", "linear"}));
  simulate->add_option("--controller", sim_controller, "controller")
      ->check(CLI::IsMember({"none", "pid", "fuzzy-pid"}));
  simulate->add_option("--out", sim_out, "trace CSV path");
  simulate->add_option("--dt", sim_dt, "integrator step [s]");
  simulate->add_option("--duration", sim_duration, "run length [s]");

  auto* tune = app.add_subcommand("tune-zn", "ultimate-gain search + Z-N gains");
  std::optional<double> tune_ku, tune_tu;
  tune->add_option("--config", flags.config_path, "config file (JSON)");
  tune->add_flag("--strict", flags.strict,
                 "fail instead of substituting defaults");
  tune->add_option("--ku", tune_ku, "skip the search, use this ultimate gain");
  tune->add_option("--tu", tune_tu, "skip the search, use this period [s]");

  auto* compare = app.add_subcommand(
      "compare", "step + disturbance scenarios under PID and fuzzy-PID");
  std::string cmp_out;
  std::optional<double> cmp_band;
  compare->add_option("--config", flags.config_path, "config file (JSON)");
  compare->add_flag("--strict", flags.strict,
                    "fail instead of substituting defaults");
  compare->add_option("--out", cmp_out, "report path (traces land beside it)");
  compare->add_option("--settle-band", cmp_band, "settling band [%]");

  auto* metrics =
      app.add_subcommand("metrics", "step-response figures for a trace CSV");
  std::string metrics_trace;
  std::optional<double> metrics_time, metrics_target, metrics_band;
  metrics->add_option("trace", metrics_trace, "trace CSV path")->required();
  metrics->add_option("--step-time", metrics_time, "step instant [s]");
  metrics->add_option("--step-target", metrics_target, "step target [cm]");
  metrics->add_option("--settle-band", metrics_band, "settling band [%]");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      return cmd_simulate(flags, sim_plant, sim_controller, sim_out, sim_dt,
                          sim_duration);
    }
    if (tune->parsed()) return cmd_tune_zn(flags, tune_ku, tune_tu);
    if (compare->parsed()) return cmd_compare(flags, cmp_out, cmp_band);
    if (metrics->parsed()) {
      return cmd_metrics(metrics_trace, metrics_time, metrics_target,
                         metrics_band);
    }
  } catch (const tanklab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const tanklab::ConfigMissing& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const tanklab::DegenerateOperatingPoint& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const tanklab::NoStepFound& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const tanklab::NonFiniteState& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNonFinite;
  } catch (const tanklab::NoUltimateGain& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNoUltimateGain;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitOk;
}
