#include "tanklab/plant.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tanklab {

namespace {

// sqrt clamped at zero: transient RK4 stage states may dip slightly negative.
double sqrt0(double x) { return x > 0.0 ? std::sqrt(x) : 0.0; }

}  // namespace

void TankParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) {
      throw std::invalid_argument(std::string(name) + " must be positive");
    }
  };
  auto non_negative = [](double v, const char* name) {
    if (!(v >= 0.0)) {
      throw std::invalid_argument(std::string(name) +
                                  " must be non-negative");
    }
  };
  positive(a1, "a1");
  positive(a2, "a2");
  non_negative(alpha1, "alpha1");
  non_negative(alpha2, "alpha2");
  non_negative(alpha3, "alpha3");
  non_negative(tc, "tc");
  positive(q_max, "q_max");
}

double flow_between_tanks(double h1, double h2, double alpha3) {
  const double dh = h1 - h2;
  if (dh > 0.0) return alpha3 * std::sqrt(dh);
  if (dh < 0.0) return -alpha3 * std::sqrt(-dh);
  return 0.0;
}

LevelRates nonlinear_derivatives(const TankState& state, const Inflows& in,
                                 const TankParams& p) {
  const double qi2 = std::clamp(in.qi2, 0.0, p.q_max);
  const double q3 = flow_between_tanks(state.h1, state.h2, p.alpha3);
  LevelRates r;
  r.dh1 = (state.q_actuator - p.alpha1 * sqrt0(state.h1) - q3) / p.a1;
  r.dh2 = (qi2 + in.qd + q3 - p.alpha2 * sqrt0(state.h2)) / p.a2;
  return r;
}

double actuator_derivative(double q_actuator, double q_commanded, double tc) {
  if (!(tc > 0.0)) {
    throw std::invalid_argument("actuator time constant must be positive");
  }
  return (q_commanded - q_actuator) / tc;
}

LinearModel linearize(const TankParams& p, double h1_op, double h2_op) {
  if (!(h2_op > 0.0) || !(h1_op > h2_op)) {
    throw DegenerateOperatingPoint(
        "operating point requires h1 > h2 > 0, got h1=" +
        std::to_string(h1_op) + " h2=" + std::to_string(h2_op));
  }
  const double c1 = p.alpha1 / (2.0 * std::sqrt(h1_op));
  const double c2 = p.alpha2 / (2.0 * std::sqrt(h2_op));
  const double c3 = p.alpha3 / (2.0 * std::sqrt(h1_op - h2_op));
  if (!(c1 + c3 > 0.0) || !(c2 + c3 > 0.0)) {
    throw DegenerateOperatingPoint(
        "operating point has no outflow path; levels would not self-regulate");
  }

  LinearModel m;
  m.h1_op = h1_op;
  m.h2_op = h2_op;
  m.k1 = 1.0 / (c1 + c3);
  m.k12 = c3 / (c1 + c3);
  m.tau1 = p.a1 / (c1 + c3);
  m.k2 = 1.0 / (c2 + c3);
  m.k21 = c3 / (c2 + c3);
  m.tau2 = p.a2 / (c2 + c3);
  m.tf_num = m.k1 * m.k2;
  m.tf_den_a = m.tau1 * m.tau2;
  m.tf_den_b = m.tau1 + m.tau2;
  m.tf_den_c = 1.0 - m.k12 * m.k21;
  return m;
}

LevelRates linear_derivatives(double h1, double h2, double q1, double q2,
                              const LinearModel& m, const TankParams& p) {
  const double c1 = p.alpha1 / (2.0 * std::sqrt(m.h1_op));
  const double c2 = p.alpha2 / (2.0 * std::sqrt(m.h2_op));
  const double c3 = p.alpha3 / (2.0 * std::sqrt(m.h1_op - m.h2_op));
  LevelRates r;
  r.dh1 = (q1 - c1 * h1 - c3 * (h1 - h2)) / p.a1;
  r.dh2 = (q2 + c3 * (h1 - h2) - c2 * h2) / p.a2;
  return r;
}

double step_response_analytic(const LinearModel& m, double q1_step, double t) {
  if (t <= 0.0) return 0.0;
  const double a = m.tf_den_a;
  const double b = m.tf_den_b;
  const double c = m.tf_den_c;
  if (!(a > 0.0) || !(b > 0.0) || !(c > 0.0)) {
    throw std::invalid_argument(
        "step response requires a stable second-order denominator");
  }
  const double gain = m.tf_num * q1_step;
  const double disc = b * b - 4.0 * a * c;

  // Repeated pole within floating-point resolution of the discriminant.
  if (std::abs(disc) <= 1e-12 * b * b) {
    const double r = -b / (2.0 * a);
    const double ert = std::exp(r * t);
    return gain * (1.0 / c - ert / (a * r * r) + t * ert / (a * r));
  }
  if (disc > 0.0) {
    const double sd = std::sqrt(disc);
    const double r1 = (-b + sd) / (2.0 * a);
    const double r2 = (-b - sd) / (2.0 * a);
    return gain * (1.0 / c + std::exp(r1 * t) / (a * r1 * (r1 - r2)) +
                   std::exp(r2 * t) / (a * r2 * (r2 - r1)));
  }
  // Complex pair: sigma +- i*wd.
  const double sigma = b / (2.0 * a);
  const double wd = std::sqrt(-disc) / (2.0 * a);
  const double env = std::exp(-sigma * t);
  return gain / c *
         (1.0 - env * (std::cos(wd * t) + sigma / wd * std::sin(wd * t)));
}

double steady_inflow(const TankParams& p, double h1_op, double h2_op) {
  return p.alpha1 * sqrt0(h1_op) + flow_between_tanks(h1_op, h2_op, p.alpha3);
}

Equilibrium equilibrium_for_level(const TankParams& p, double h2) {
  if (!(h2 > 0.0)) {
    throw std::invalid_argument("equilibrium level must be positive");
  }
  if (!(p.alpha3 > 0.0)) {
    throw std::invalid_argument(
        "equilibrium requires a coupling path (alpha3 > 0)");
  }
  // Tank 2 balance: alpha3*sqrt(h1-h2) = alpha2*sqrt(h2).
  const double ratio = p.alpha2 / p.alpha3;
  Equilibrium e;
  e.h2 = h2;
  e.h1 = h2 * (1.0 + ratio * ratio);
  e.q = p.alpha1 * std::sqrt(e.h1) + p.alpha2 * std::sqrt(h2);
  return e;
}

}  // namespace tanklab
