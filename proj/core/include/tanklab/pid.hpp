#pragma once

#include "tanklab/errors.hpp"
#include "tanklab/plant.hpp"

namespace tanklab {

struct PidGains {
  double kp = 0.0;
  double ki = 0.0;  ///< integral gain, kp/ti [1/s]
  double kd = 0.0;  ///< derivative gain, kp*td [s]

  /// Throws std::invalid_argument if any gain is negative or non-finite.
  void validate() const;
};

/// Persistent controller state.  A fresh value is a freshly reset controller;
/// the first step after reset uses a zero derivative.
struct PidState {
  double integral_accumulator = 0.0;  ///< integral of error [cm*s]
  double previous_error = 0.0;        ///< error at the previous step [cm]
  bool initialized = false;           ///< false until the first step runs
};

/// One discrete PID update.
///
/// Integration is trapezoidal, the derivative is a backward difference on
/// the error, and the output is saturated to [u_min, u_max].  Two anti-windup
/// measures are active by default: the accumulator is clamped so the integral
/// term alone stays within the output range, and integration is skipped when
/// the unsaturated output exceeds a limit while the error pushes further in
/// that direction (conditional integration).  Pass anti_windup = false for
/// the plain textbook controller (saturation only).
///
/// Requires dt > 0 and u_min < u_max.  Returns the saturated output.
double pid_step(PidState& state, double error, double dt, const PidGains& g,
                double u_min, double u_max, bool anti_windup = true);

/// Result of the ultimate-gain search: the proportional gain at the stability
/// boundary and the period of the sustained oscillation there.
struct UltimateGainResult {
  double ku = 0.0;  ///< ultimate gain
  double tu = 0.0;  ///< ultimate period [s]
};

/// Bracket and tolerance for the ultimate-gain bisection.
struct GainSearch {
  double k_lo = 0.0;          ///< lower bracket, must be stable
  double k_hi = 1e4;          ///< upper bracket
  double tolerance = 1e-9;    ///< relative bracket width at termination
};

/// Ziegler-Nichols (ultimate-cycle) PID gains from the ultimate gain and
/// period: kp = ku/1.7, ti = tu/2, td = tu/8.  Requires ku > 0, tu > 0.
PidGains zn_from_ultimate(double ku, double tu);

/// Ultimate gain of the proportional loop closed around the linearized plant
/// with the first-order actuator lag p.tc in series.
///
/// The stability boundary of the cubic characteristic polynomial is located
/// by bisection on a Routh-criterion stability test; the oscillation
/// frequency at the boundary gives tu.  Throws NoUltimateGain when the loop
/// is stable across the whole bracket (e.g. tc == 0, where the loop is only
/// second order), std::invalid_argument on a bad bracket.
UltimateGainResult find_ultimate_gain(const TankParams& p,
                                      const LinearModel& m,
                                      const GainSearch& search = {});

}  // namespace tanklab
