#include "tanklab/pid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tanklab {

void PidGains::validate() const {
  if (!(kp >= 0.0) || !(ki >= 0.0) || !(kd >= 0.0) || !std::isfinite(kp) ||
      !std::isfinite(ki) || !std::isfinite(kd)) {
    throw std::invalid_argument("pid gains must be finite and non-negative");
  }
}

double pid_step(PidState& state, double error, double dt, const PidGains& g,
                double u_min, double u_max, bool anti_windup) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(u_min < u_max)) throw std::invalid_argument("u_min must be < u_max");

  const double derivative =
      state.initialized ? (error - state.previous_error) / dt : 0.0;

  // Trapezoidal candidate; previous_error is zero on the first step.
  double candidate = state.integral_accumulator +
                     dt * (error + state.previous_error) / 2.0;
  if (anti_windup && g.ki > 0.0) {
    candidate = std::clamp(candidate, u_min / g.ki, u_max / g.ki);
  }

  double u = g.kp * error + g.ki * candidate + g.kd * derivative;
  const bool pushing_past_limit =
      (u > u_max && error > 0.0) || (u < u_min && error < 0.0);
  if (anti_windup && pushing_past_limit) {
    // Conditional integration: hold the accumulator this step.
    u = g.kp * error + g.ki * state.integral_accumulator + g.kd * derivative;
  } else {
    state.integral_accumulator = candidate;
  }

  state.previous_error = error;
  state.initialized = true;
  return std::clamp(u, u_min, u_max);
}

PidGains zn_from_ultimate(double ku, double tu) {
  if (!(ku > 0.0) || !(tu > 0.0)) {
    throw std::invalid_argument("ultimate gain and period must be positive");
  }
  PidGains g;
  g.kp = ku / 1.7;
  const double ti = tu / 2.0;
  const double td = tu / 8.0;
  g.ki = g.kp / ti;
  g.kd = g.kp * td;
  return g;
}

UltimateGainResult find_ultimate_gain(const TankParams& p,
                                      const LinearModel& m,
                                      const GainSearch& search) {
  const double a = m.tf_den_a;
  const double b = m.tf_den_b;
  const double c = m.tf_den_c;
  if (!(a > 0.0) || !(b > 0.0) || !(c > 0.0) || !(m.tf_num > 0.0)) {
    throw std::invalid_argument(
        "ultimate-gain search requires a stable plant with positive gain");
  }
  if (!(p.tc >= 0.0)) throw std::invalid_argument("tc must be non-negative");
  if (!(search.k_lo >= 0.0) || !(search.k_lo < search.k_hi) ||
      !(search.tolerance > 0.0)) {
    throw std::invalid_argument("gain search bracket is invalid");
  }

  // With the actuator lag 1/(tc s + 1) in series, the closed-loop
  // characteristic polynomial is
  //   tc*a s^3 + (a + tc*b) s^2 + (b + tc*c) s + (c + K*num).
  const double a3 = p.tc * a;
  const double a2 = a + p.tc * b;
  const double a1 = b + p.tc * c;

  const auto stable = [&](double k) {
    const double a0 = c + k * m.tf_num;
    if (!(a0 > 0.0)) return false;
    if (a3 <= 0.0) return true;  // second-order loop: always stable here
    return a2 * a1 > a3 * a0;    // Routh first-column condition
  };

  if (stable(search.k_hi)) {
    throw NoUltimateGain(
        "proportional loop is stable for every gain in the search bracket");
  }
  if (!stable(search.k_lo)) {
    throw std::invalid_argument("k_lo must be a stable gain");
  }

  double lo = search.k_lo;
  double hi = search.k_hi;
  while (hi - lo > search.tolerance * std::max(1.0, std::abs(hi))) {
    const double mid = 0.5 * (lo + hi);
    (stable(mid) ? lo : hi) = mid;
  }

  UltimateGainResult r;
  r.ku = 0.5 * (lo + hi);
  // At the boundary the pair of roots sits at +-i*omega with
  // omega^2 = a1/a3 (from the auxiliary equation a2 s^2 + a0 = 0 combined
  // with a2*a1 = a3*a0).
  const double omega = std::sqrt(a1 / a3);
  r.tu = 2.0 * std::numbers::pi / omega;
  return r;
}

}  // namespace tanklab
