#include "tanklab/fuzzy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tanklab {

double membership(const TriangularMf& mf, double x) {
  if (x == mf.peak) return 1.0;
  if (x <= mf.left || x >= mf.right) return 0.0;
  return x < mf.peak ? (x - mf.left) / (mf.peak - mf.left)
                     : (mf.right - x) / (mf.right - mf.peak);
}

void LinguisticVariable::validate() const {
  if (!(lo < hi)) {
    throw std::invalid_argument("variable '" + name +
                                "': universe bounds must satisfy lo < hi");
  }
  double prev_peak = lo - 1.0;
  for (const auto& [label, mf] : terms) {
    if (label.empty()) {
      throw std::invalid_argument("variable '" + name + "': empty term label");
    }
    if (!(mf.left <= mf.peak) || !(mf.peak <= mf.right)) {
      throw std::invalid_argument("variable '" + name + "', term '" + label +
                                  "': vertices must be ordered");
    }
    if (mf.peak < lo || mf.peak > hi) {
      throw std::invalid_argument("variable '" + name + "', term '" + label +
                                  "': peak outside the universe");
    }
    if (!(mf.peak > prev_peak)) {
      throw std::invalid_argument("variable '" + name +
                                  "': term peaks must be strictly increasing");
    }
    prev_peak = mf.peak;
  }
  // Coverage: every point of the universe must belong to some term.
  constexpr int kProbes = 1001;
  for (int i = 0; i < kProbes; ++i) {
    const double x = lo + (hi - lo) * i / (kProbes - 1);
    double best = 0.0;
    for (const auto& [label, mf] : terms) best = std::max(best, membership(mf, x));
    if (!(best > 0.0)) {
      throw std::invalid_argument("variable '" + name +
                                  "': partition does not cover the universe");
    }
  }
}

std::array<double, kTermCount> fuzzify(const LinguisticVariable& var,
                                       double x) {
  const double clamped = std::clamp(x, var.lo, var.hi);
  std::array<double, kTermCount> degrees{};
  for (int i = 0; i < kTermCount; ++i) {
    degrees[i] = membership(var.terms[i].second, clamped);
  }
  return degrees;
}

RuleTable RuleTable::defaults() {
  RuleTable t;
  t.cells = {{{0, 0, 0, 1, 2},
              {0, 0, 1, 2, 3},
              {0, 1, 2, 3, 4},
              {1, 2, 3, 4, 4},
              {2, 3, 4, 4, 4}}};
  return t;
}

void RuleTable::validate() const {
  for (const auto& row : cells) {
    for (const auto cell : row) {
      if (cell >= kTermCount) {
        throw std::invalid_argument("rule table cell out of range");
      }
    }
  }
}

void FuzzyScheduler::validate() const {
  e_var.validate();
  ce_var.validate();
  kp_var.validate();
  ki_var.validate();
  kd_var.validate();
  rules.validate();
  if (!(e_scale > 0.0) || !(ce_scale > 0.0)) {
    throw std::invalid_argument("input scales must be positive");
  }
  if (defuzz_resolution < 101) {
    throw std::invalid_argument("defuzzification resolution must be >= 101");
  }
  for (int i = 0; i < kTermCount; ++i) {
    if (kp_var.terms[i].first != ki_var.terms[i].first ||
        kp_var.terms[i].first != kd_var.terms[i].first) {
      throw std::invalid_argument(
          "output variables must share one label set");
    }
  }
}

LinguisticVariable default_input_variable(std::string name) {
  LinguisticVariable v;
  v.name = std::move(name);
  v.lo = -1.0;
  v.hi = 1.0;
  // Shouldered ends: the outermost terms stay saturated at the bounds.
  v.terms = {{{"NB", {-1.0, -1.0, -0.5}},
              {"NS", {-1.0, -0.5, 0.0}},
              {"Z", {-0.5, 0.0, 0.5}},
              {"PS", {0.0, 0.5, 1.0}},
              {"PB", {0.5, 1.0, 1.0}}}};
  return v;
}

LinguisticVariable default_output_variable(std::string name,
                                           double reference_gain) {
  if (!(reference_gain > 0.0)) {
    throw std::invalid_argument("reference gain for output variable '" +
                                name + "' must be positive");
  }
  LinguisticVariable v;
  v.name = std::move(name);
  v.lo = 0.0;
  v.hi = 2.0 * reference_gain;
  const double g = reference_gain;
  v.terms = {{{"S", {0.0, 0.0, 0.5 * g}},
              {"MS", {0.0, 0.5 * g, g}},
              {"M", {0.5 * g, g, 1.5 * g}},
              {"MB", {g, 1.5 * g, 2.0 * g}},
              {"B", {1.5 * g, 2.0 * g, 2.0 * g}}}};
  return v;
}

namespace {

// Centroid of the clipped-and-aggregated output set, sampled uniformly with
// both endpoints included.
double defuzzify(const LinguisticVariable& var,
                 const std::array<double, kTermCount>& strengths,
                 int resolution) {
  double weighted = 0.0;
  double total = 0.0;
  for (int i = 0; i < resolution; ++i) {
    const double x = var.lo + (var.hi - var.lo) * i / (resolution - 1);
    double mu = 0.0;
    for (int k = 0; k < kTermCount; ++k) {
      if (strengths[k] <= mu) continue;  // cannot raise the max
      mu = std::max(mu,
                    std::min(strengths[k], membership(var.terms[k].second, x)));
    }
    weighted += x * mu;
    total += mu;
  }
  if (!(total > 0.0)) {
    throw EmptyAggregate("no rule fired for output variable '" + var.name +
                         "'");
  }
  return weighted / total;
}

}  // namespace

FuzzyScheduler make_default_scheduler(const PidGains& reference,
                                      double e_scale, double ce_scale) {
  if (!(e_scale > 0.0) || !(ce_scale > 0.0)) {
    throw std::invalid_argument("input scales must be positive");
  }
  FuzzyScheduler s;
  s.e_var = default_input_variable("e");
  s.ce_var = default_input_variable("ce");
  s.kp_var = default_output_variable("kp", reference.kp);
  s.ki_var = default_output_variable("ki", reference.ki);
  s.kd_var = default_output_variable("kd", reference.kd);
  s.rules = RuleTable::defaults();
  s.e_scale = e_scale;
  s.ce_scale = ce_scale;
  return s;
}

PidGains infer(const FuzzyScheduler& s, double error, double error_change) {
  const auto fe = fuzzify(s.e_var, error * s.e_scale);
  const auto fce = fuzzify(s.ce_var, error_change * s.ce_scale);

  // Aggregate rule strengths per output term (max over firing rules).
  std::array<double, kTermCount> strengths{};
  for (int i = 0; i < kTermCount; ++i) {
    if (fe[i] <= 0.0) continue;
    for (int j = 0; j < kTermCount; ++j) {
      const double w = std::min(fe[i], fce[j]);
      if (w <= 0.0) continue;
      auto& slot = strengths[s.rules.cells[i][j]];
      slot = std::max(slot, w);
    }
  }

  PidGains g;
  g.kp = defuzzify(s.kp_var, strengths, s.defuzz_resolution);
  g.ki = defuzzify(s.ki_var, strengths, s.defuzz_resolution);
  g.kd = defuzzify(s.kd_var, strengths, s.defuzz_resolution);
  return g;
}

FuzzyPidResult fuzzy_pid_step(const FuzzyScheduler& s, PidState& state,
                              double error, double dt, double u_min,
                              double u_max) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const double change =
      state.initialized ? (error - state.previous_error) / dt : 0.0;
  FuzzyPidResult r;
  r.gains = infer(s, error, change);
  r.u = pid_step(state, error, dt, r.gains, u_min, u_max);
  return r;
}

}  // namespace tanklab
