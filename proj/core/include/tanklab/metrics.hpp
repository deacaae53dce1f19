#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tanklab/errors.hpp"
#include "tanklab/sim.hpp"

namespace tanklab {

/// Classic step-response figures computed from a trace's h2 column.
/// rise_time and settling_time are absent when the trace never produces the
/// corresponding event (no 10->90% traversal; never staying inside the band).
struct StepMetrics {
  double overshoot_pct = 0.0;  ///< peak beyond target, % of step amplitude
  std::optional<double> rise_time;      ///< 10% -> 90% of amplitude [s]
  std::optional<double> settling_time;  ///< entry into the final band [s]
  double steady_state_error = 0.0;      ///< |target - final value| [cm]
  double final_value = 0.0;             ///< mean h2 over the last 5% [cm]
};

/// Analyze the step that drives the setpoint to step_target at step_time.
///
/// The pre-step baseline is h2 at the first sample at/after step_time, the
/// amplitude is target minus baseline, and the final value is the mean of h2
/// over the trailing 5% of the analyzed window.  Rise time interpolates the
/// 10% and 90% crossings linearly between samples.  Settling time is the
/// first instant after which h2 stays within settle_band_pct% of the
/// amplitude around the final value.  Throws NoStepFound when the trace does
/// not contain such a step (empty trace, step_time beyond the trace, the
/// setpoint at step_time differing from step_target, or zero amplitude).
StepMetrics step_metrics(const Trace& trace, double step_time,
                         double step_target, double settle_band_pct = 2.0);

/// The step a scenario's setpoint schedule commands: the last transition,
/// with its amplitude measured from the previous setpoint value (or the
/// initial tank 2 level when there is only one knot).  Throws NoStepFound
/// for an empty schedule.
struct StepSpec {
  double time = 0.0;
  double target = 0.0;
  double amplitude = 0.0;
};
StepSpec scenario_step(const Scenario& scenario);

/// One controller's row in a comparison report; `metrics` is empty when the
/// analysis failed, with the reason in `note`.
struct ComparisonRow {
  std::string name;
  std::optional<StepMetrics> metrics;
  std::string note;
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;
  /// Per-figure verdicts: (figure name, winner name | "tie" | "n/a").
  std::vector<std::pair<std::string, std::string>> verdicts;

  std::string to_text() const;
  std::string to_csv() const;
};

/// Compare named traces of one scenario.  Lower overshoot, rise time,
/// settling time and steady-state error win; rows whose analysis throws are
/// reported as degraded instead of failing the report.  Throws
/// std::invalid_argument when no traces are given.
ComparisonReport compare(
    const std::vector<std::pair<std::string, Trace>>& traces,
    const Scenario& scenario, double settle_band_pct = 2.0);

}  // namespace tanklab
