#pragma once

#include <array>
#include <vector>

#include "tanklab/fuzzy.hpp"
#include "tanklab/pid.hpp"
#include "tanklab/plant.hpp"

namespace tanklab {

enum class PlantKind { nonlinear, linear };
enum class ControllerKind { none, pid, fuzzy_pid };

/// One knot of a zero-order-hold schedule: `value` applies from `time`
/// (inclusive) until the next knot.  Before the first knot the schedule
/// reads 0.
struct SchedulePoint {
  double time = 0.0;
  double value = 0.0;
};

/// Value of a ZOH schedule at time t.
double schedule_value(const std::vector<SchedulePoint>& schedule, double t);

/// A complete closed- or open-loop experiment description.
struct Scenario {
  double duration = 100.0;  ///< [s]
  double dt = 0.01;         ///< fixed integrator step [s]
  PlantKind plant_kind = PlantKind::nonlinear;
  ControllerKind controller_kind = ControllerKind::pid;
  TankState initial_state;
  std::vector<SchedulePoint> setpoints;     ///< tank 2 level reference [cm]
  std::vector<SchedulePoint> disturbances;  ///< qd into tank 2 [cm^3/s]
  /// Commanded pump flow when controller_kind == none (open loop).
  std::vector<SchedulePoint> inflows;
  /// When false the pump lag is bypassed: the achieved flow equals the
  /// (saturated) command within the same step.
  bool actuator_enabled = true;
  /// Operating point for plant_kind == linear; the model simulates
  /// perturbations about it but the trace reports absolute levels.
  double h1_op = 22.0;
  double h2_op = 9.0;
  /// Initial PID integral accumulator [cm*s].  Preloading it with
  /// q_hold / ki starts the loop bumplessly at an equilibrium.
  double initial_integral = 0.0;

  /// Throws std::invalid_argument on non-positive dt/duration, unsorted
  /// schedules, or negative initial levels.
  void validate() const;
};

/// One sample of a simulation run; field order matches the CSV column order.
struct TraceRow {
  double t = 0.0;
  double setpoint = 0.0;
  double h1 = 0.0;
  double h2 = 0.0;
  double q_commanded = 0.0;
  double q_actuator = 0.0;
  double error = 0.0;
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;
};

struct Trace {
  std::vector<TraceRow> rows;
  /// CSV column names, in TraceRow field order.
  static const std::array<const char*, 10> kColumns;
};

/// Advance the nonlinear plant one step with classic fixed-step RK4 over the
/// joint (h1, h2, q_actuator) state.  The commanded flow in.qi1 is clamped to
/// [0, q_max] and held over the step; with the actuator disabled it is
/// applied directly.  After the step, levels are clamped at 0 and the
/// actuator flow to [0, q_max].  Throws NonFiniteState if any component
/// leaves the finite range.
TankState integrate_step(const TankState& state, const Inflows& in,
                         const TankParams& p, double dt,
                         bool actuator_enabled = true);

/// Run a scenario and record one row per step boundary, t = 0, dt, ...,
/// floor(duration/dt)*dt (the controller also runs on the final row).
///
/// `pid` must be non-null for ControllerKind::pid, `scheduler` for
/// ControllerKind::fuzzy_pid; otherwise ConfigMissing is thrown.  Controller
/// output saturates at [0, q_max].
///
/// The linear plant simulates perturbations about the scenario's operating
/// point (which must satisfy the linearization preconditions) and reports
/// absolute levels; commanded/achieved flows are absolute, with the
/// perturbation input taken against the operating point's steady inflow.
/// The integrated dynamics are the realization of the model's reference
/// transfer function, so linear traces match step_response_analytic (see
/// the LinearModel docs for how that differs from the Jacobian pair).
Trace run_scenario(const Scenario& scenario, const TankParams& p,
                   const PidGains* pid = nullptr,
                   const FuzzyScheduler* scheduler = nullptr);

}  // namespace tanklab
