#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tanklab/errors.hpp"
#include "tanklab/pid.hpp"

namespace tanklab {

/// Number of linguistic terms per variable (five-term partitions throughout).
inline constexpr int kTermCount = 5;

/// Triangular membership function with vertices left <= peak <= right.
/// Degenerate edges (left == peak or peak == right) give a shoulder that is
/// 1 exactly at the peak; membership is 0 outside [left, right].
struct TriangularMf {
  double left = 0.0;
  double peak = 0.0;
  double right = 0.0;
};

/// Membership degree of x in mf, in [0, 1].
double membership(const TriangularMf& mf, double x);

/// A named variable over [lo, hi] with an ordered five-term partition.
struct LinguisticVariable {
  std::string name;
  double lo = -1.0;
  double hi = 1.0;
  std::array<std::pair<std::string, TriangularMf>, kTermCount> terms;

  /// Throws std::invalid_argument unless lo < hi, the term peaks are strictly
  /// increasing within [lo, hi], and the partition covers the universe (some
  /// term has positive membership at every point).
  void validate() const;
};

/// Membership degrees of x (clamped to the universe) in each term, in term
/// order.
std::array<double, kTermCount> fuzzify(const LinguisticVariable& var,
                                       double x);

/// 5x5 rule consequents: cells[i][j] is the output term index fired by
/// (error term i, error-change term j), both indexed from the most negative
/// term upward.
struct RuleTable {
  std::array<std::array<std::uint8_t, kTermCount>, kTermCount> cells{};

  /// The stock rule base: small outputs when error and its trend oppose the
  /// setpoint gap, large ones when they compound it; anti-diagonally
  /// symmetric.
  static RuleTable defaults();

  /// Throws std::invalid_argument if any cell is out of range.
  void validate() const;
};

/// Mamdani gain scheduler: two inputs (error, error change), three outputs
/// (kp, ki, kd), min conjunction, min clipping, max aggregation, discrete
/// centroid defuzzification.
struct FuzzyScheduler {
  LinguisticVariable e_var;    ///< scaled error input
  LinguisticVariable ce_var;   ///< scaled error-change input
  LinguisticVariable kp_var;   ///< proportional-gain output
  LinguisticVariable ki_var;   ///< integral-gain output
  LinguisticVariable kd_var;   ///< derivative-gain output
  RuleTable rules = RuleTable::defaults();
  double e_scale = 1.0;        ///< multiplies raw error before fuzzification
  double ce_scale = 1.0;       ///< multiplies raw error change [s]
  int defuzz_resolution = 1001;  ///< centroid sample count, endpoints included

  /// Validates every variable, the rule table, the scales (positive) and the
  /// resolution (>= 101), and that the three output variables share one label
  /// set.  Throws std::invalid_argument.
  void validate() const;
};

/// Stock input partition over [-1, 1]: NB/NS/Z/PS/PB with peaks at
/// {-1, -0.5, 0, 0.5, 1} and shouldered ends.
LinguisticVariable default_input_variable(std::string name);

/// Stock output partition over [0, 2*g]: S/MS/M/MB/B with peaks at
/// {0, 0.5, 1, 1.5, 2}*g, shouldered ends, so the mid term reproduces the
/// reference gain g.  Requires g > 0.
LinguisticVariable default_output_variable(std::string name,
                                           double reference_gain);

/// Scheduler with the stock partitions for both inputs and all three
/// outputs.  Requires positive reference gains and scales.
FuzzyScheduler make_default_scheduler(const PidGains& reference,
                                      double e_scale, double ce_scale);

/// One inference pass: returns the defuzzified (kp, ki, kd) for a raw error
/// and error change.  Throws EmptyAggregate if no rule fires (a malformed,
/// non-covering partition).
PidGains infer(const FuzzyScheduler& s, double error, double error_change);

struct FuzzyPidResult {
  double u = 0.0;    ///< saturated controller output
  PidGains gains;    ///< gains the scheduler picked this step
};

/// Gain-scheduled PID step: infers gains from the error and its backward
/// difference (zero on the first step), then runs the usual PID update with
/// them.  Shares PidState semantics with pid_step.
FuzzyPidResult fuzzy_pid_step(const FuzzyScheduler& s, PidState& state,
                              double error, double dt, double u_min,
                              double u_max);

}  // namespace tanklab
