#pragma once

#include "tanklab/errors.hpp"

namespace tanklab {

/// Physical parameters of the coupled-tank rig.
///
/// Units: areas in cm^2, orifice coefficients in cm^(5/2)/s (flow per sqrt
/// of head), time constant in s, flows in cm^3/s.
struct TankParams {
  double a1 = 32.0;       ///< tank 1 cross-section
  double a2 = 32.0;       ///< tank 2 cross-section
  double alpha1 = 14.30;  ///< tank 1 outlet orifice coefficient
  double alpha2 = 14.30;  ///< tank 2 outlet orifice coefficient
  double alpha3 = 20.00;  ///< coupling orifice coefficient
  double tc = 1.0;        ///< pump actuator time constant
  double q_max = 300.0;   ///< pump flow limit

  /// Throws std::invalid_argument on non-physical values.  Areas and q_max
  /// must be positive, orifice coefficients non-negative, tc non-negative
  /// (tc == 0 models an instantaneous pump and is rejected where the
  /// actuator lag is actually integrated).
  void validate() const;
};

/// Instantaneous state of the rig: two levels plus the pump's achieved flow.
struct TankState {
  double h1 = 0.0;          ///< tank 1 level [cm]
  double h2 = 0.0;          ///< tank 2 level [cm]
  double q_actuator = 0.0;  ///< flow the pump currently delivers [cm^3/s]
};

/// External flows applied to the rig at one instant.
struct Inflows {
  double qi1 = 0.0;  ///< commanded pump flow into tank 1 [cm^3/s]
  double qi2 = 0.0;  ///< direct inflow into tank 2 [cm^3/s]
  double qd = 0.0;   ///< disturbance flow into tank 2, may be negative
};

/// Level time-derivatives (dh1/dt, dh2/dt) [cm/s].
struct LevelRates {
  double dh1 = 0.0;
  double dh2 = 0.0;
};

/// Linearization of the plant about an operating point (H1, H2), H1 > H2 > 0.
///
/// Carries both the section constants of the Jacobian pair (tau1, tau2, k1,
/// k2, k12, k21; see linear_derivatives) and the reference transfer function
/// from pump-flow perturbation to tank 2 level perturbation:
///
///   G(s) = tf_num / (tf_den_a s^2 + tf_den_b s + tf_den_c)
///
/// with tf_num = k1*k2, tf_den = (tau1*tau2, tau1+tau2, 1 - k12*k21).  Note
/// the reference numerator is k1*k2 even though eliminating the Jacobian
/// pair symbolically yields k1*k21; the two models are deliberately kept
/// as published rather than reconciled.  Transfer-function work
/// (step_response_analytic, find_ultimate_gain, the simulator's linear
/// plant) uses tf_num/tf_den; local Taylor-fidelity work uses
/// linear_derivatives.
struct LinearModel {
  double h1_op = 0.0;
  double h2_op = 0.0;
  double tau1 = 0.0;  ///< tank 1 section time constant [s]
  double tau2 = 0.0;  ///< tank 2 section time constant [s]
  double k1 = 0.0;    ///< tank 1 gain from its inflow
  double k2 = 0.0;    ///< tank 2 gain from its inflow
  double k12 = 0.0;   ///< coupling gain, tank 2 level into tank 1
  double k21 = 0.0;   ///< coupling gain, tank 1 level into tank 2
  double tf_num = 0.0;
  double tf_den_a = 0.0;
  double tf_den_b = 0.0;
  double tf_den_c = 0.0;
};

/// An equilibrium of the rig (qi2 = qd = 0): constant pump flow q holds the
/// levels at (h1, h2).
struct Equilibrium {
  double h1 = 0.0;
  double h2 = 0.0;
  double q = 0.0;
};

/// Signed flow through the coupling orifice, positive from tank 1 to tank 2:
/// alpha3 * sign(h1 - h2) * sqrt(|h1 - h2|).
double flow_between_tanks(double h1, double h2, double alpha3);

/// Level rates of the nonlinear plant.  The pump flow seen by tank 1 is
/// state.q_actuator; inflows.qi1 (the commanded flow) only reaches the tank
/// through the actuator lag, so it is ignored here.  qi2 is clamped to
/// [0, q_max]; qd is applied as-is.  Levels below zero contribute no outflow.
LevelRates nonlinear_derivatives(const TankState& state, const Inflows& in,
                                 const TankParams& p);

/// First-order actuator lag: dq/dt = (q_commanded - q_actuator) / tc.
/// Requires tc > 0.
double actuator_derivative(double q_actuator, double q_commanded, double tc);

/// Linearize about (h1_op, h2_op).  Requires h1_op > h2_op > 0 and a
/// non-degenerate outflow path; throws DegenerateOperatingPoint otherwise.
LinearModel linearize(const TankParams& p, double h1_op, double h2_op);

/// Level-perturbation rates of the linearized plant.  h1, h2, q1, q2 are all
/// perturbations about the model's operating point (q1 perturbs the tank 1
/// inflow, q2 the tank 2 inflow).
LevelRates linear_derivatives(double h1, double h2, double q1, double q2,
                              const LinearModel& m, const TankParams& p);

/// Closed-form tank 2 step response of the linearized plant: the level
/// perturbation at time t >= 0 after a pump-flow perturbation step of
/// q1_step at t = 0 from rest.  Handles real distinct, repeated and complex
/// pole pairs.
double step_response_analytic(const LinearModel& m, double q1_step, double t);

/// Pump flow that holds tank 1 steady at (h1_op, h2_op):
/// alpha1*sqrt(h1_op) + flow through the coupling orifice.
double steady_inflow(const TankParams& p, double h1_op, double h2_op);

/// Equilibrium of the full rig for a target tank 2 level (qi2 = qd = 0).
/// Requires h2 > 0 and alpha3 > 0.
Equilibrium equilibrium_for_level(const TankParams& p, double h2);

}  // namespace tanklab
