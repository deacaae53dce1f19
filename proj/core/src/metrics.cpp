#include "tanklab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iomanip>
#include <sstream>

namespace tanklab {

StepMetrics step_metrics(const Trace& trace, double step_time,
                         double step_target, double settle_band_pct) {
  if (!(settle_band_pct > 0.0)) {
    throw std::invalid_argument("settle band must be positive");
  }
  const auto& rows = trace.rows;
  if (rows.empty()) throw NoStepFound("trace is empty");

  // First sample at or after the step instant.
  std::size_t start = rows.size();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].t >= step_time - 1e-9) {
      start = i;
      break;
    }
  }
  if (start == rows.size()) {
    throw NoStepFound("step time lies beyond the end of the trace");
  }
  if (std::abs(rows[start].setpoint - step_target) >
      1e-9 * std::max(1.0, std::abs(step_target))) {
    throw NoStepFound("setpoint at the step time is not the requested target");
  }

  const double base = rows[start].h2;
  const double amplitude = step_target - base;
  if (std::abs(amplitude) < 1e-12) {
    throw NoStepFound("step amplitude is zero");
  }

  const std::size_t n = rows.size() - start;
  // Normalize so the response runs 0 -> 1 regardless of step direction.
  const auto y = [&](std::size_t i) {
    return (rows[start + i].h2 - base) / amplitude;
  };
  const auto t = [&](std::size_t i) { return rows[start + i].t; };

  const std::size_t tail =
      std::max<std::size_t>(1, static_cast<std::size_t>(
                                   std::ceil(static_cast<double>(n) * 0.05)));
  double tail_sum = 0.0;
  for (std::size_t i = n - tail; i < n; ++i) tail_sum += y(i);
  const double final_norm = tail_sum / static_cast<double>(tail);

  double peak = y(0);
  for (std::size_t i = 1; i < n; ++i) peak = std::max(peak, y(i));

  StepMetrics m;
  m.overshoot_pct = std::max(0.0, (peak - 1.0) * 100.0);
  m.final_value = base + amplitude * final_norm;
  m.steady_state_error = std::abs(step_target - m.final_value);

  // Rise time: linear interpolation of the first 10% and 90% crossings.
  const auto first_crossing = [&](double level) -> std::optional<double> {
    for (std::size_t i = 1; i < n; ++i) {
      if (y(i) >= level && y(i - 1) < level) {
        const double frac = (level - y(i - 1)) / (y(i) - y(i - 1));
        return t(i - 1) + frac * (t(i) - t(i - 1));
      }
    }
    return std::nullopt;
  };
  const auto t10 = first_crossing(0.1);
  const auto t90 = first_crossing(0.9);
  if (t10 && t90) m.rise_time = *t90 - *t10;

  // Settling time: the first instant after the last excursion outside the
  // band around the final value.
  const double band = settle_band_pct / 100.0;
  std::size_t last_outside = n;  // n means "never outside"
  for (std::size_t i = n; i-- > 0;) {
    if (std::abs(y(i) - final_norm) > band) {
      last_outside = i;
      break;
    }
  }
  if (last_outside == n) {
    m.settling_time = 0.0;  // inside the band from the step onward
  } else if (last_outside + 1 < n) {
    m.settling_time = t(last_outside + 1) - step_time;
  }  // else: still outside at the end -> never settles, leave absent
  return m;
}

StepSpec scenario_step(const Scenario& scenario) {
  const auto& sp = scenario.setpoints;
  if (sp.empty()) throw NoStepFound("scenario has no setpoint schedule");
  StepSpec s;
  s.time = sp.back().time;
  s.target = sp.back().value;
  const double previous = sp.size() >= 2 ? sp[sp.size() - 2].value
                                         : scenario.initial_state.h2;
  s.amplitude = s.target - previous;
  return s;
}

ComparisonReport compare(
    const std::vector<std::pair<std::string, Trace>>& traces,
    const Scenario& scenario, double settle_band_pct) {
  if (traces.empty()) {
    throw std::invalid_argument("no traces to compare");
  }
  const StepSpec step = scenario_step(scenario);

  ComparisonReport report;
  for (const auto& [name, trace] : traces) {
    ComparisonRow row;
    row.name = name;
    try {
      row.metrics = step_metrics(trace, step.time, step.target,
                                 settle_band_pct);
    } catch (const std::exception& e) {
      row.note = e.what();
    }
    report.rows.push_back(std::move(row));
  }

  struct Figure {
    const char* label;
    std::optional<double> (*value)(const StepMetrics&);
  };
  const Figure figures[] = {
      {"overshoot",
       [](const StepMetrics& m) { return std::optional<double>(m.overshoot_pct); }},
      {"rise_time", [](const StepMetrics& m) { return m.rise_time; }},
      {"settling_time", [](const StepMetrics& m) { return m.settling_time; }},
      {"steady_state_error",
       [](const StepMetrics& m) {
         return std::optional<double>(m.steady_state_error);
       }},
  };
  for (const auto& fig : figures) {
    std::string verdict = "n/a";
    std::optional<double> best;
    bool tie = false;
    std::string winner;
    int contenders = 0;
    for (const auto& row : report.rows) {
      if (!row.metrics) continue;
      const auto v = fig.value(*row.metrics);
      if (!v) continue;
      ++contenders;
      if (!best || *v < *best - 1e-12) {
        best = *v;
        winner = row.name;
        tie = false;
      } else if (*v <= *best + 1e-12) {
        tie = true;
      }
    }
    if (contenders >= 2) verdict = tie ? "tie" : winner;
    report.verdicts.emplace_back(fig.label, verdict);
  }
  return report;
}

namespace {

std::string fmt(double v, int precision = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << v;
  return os.str();
}

std::string fmt_opt(const std::optional<double>& v, int precision = 4) {
  return v ? fmt(*v, precision) : std::string("n/a");
}

}  // namespace

std::string ComparisonReport::to_text() const {
  std::ostringstream os;
  os << std::left << std::setw(14) << "controller" << std::right
     << std::setw(16) << "overshoot_pct" << std::setw(14) << "rise_time_s"
     << std::setw(18) << "settling_time_s" << std::setw(10) << "sse_cm"
     << std::setw(12) << "final_cm" << '\n';
  for (const auto& row : rows) {
    os << std::left << std::setw(14) << row.name << std::right;
    if (row.metrics) {
      const auto& m = *row.metrics;
      os << std::setw(16) << fmt(m.overshoot_pct, 2) << std::setw(14)
         << fmt_opt(m.rise_time, 3) << std::setw(18)
         << fmt_opt(m.settling_time, 3) << std::setw(10)
         << fmt(m.steady_state_error) << std::setw(12) << fmt(m.final_value);
    } else {
      os << "  analysis failed: " << row.note;
    }
    os << '\n';
  }
  os << '\n';
  for (const auto& [figure, verdict] : verdicts) {
    os << "best " << figure << ": " << verdict << '\n';
  }
  return os.str();
}

std::string ComparisonReport::to_csv() const {
  std::ostringstream os;
  os << "controller,overshoot_pct,rise_time_s,settling_time_s,sse_cm,final_cm,"
        "note\n";
  for (const auto& row : rows) {
    os << row.name << ',';
    if (row.metrics) {
      const auto& m = *row.metrics;
      os << fmt(m.overshoot_pct, 6) << ',' << fmt_opt(m.rise_time, 6) << ','
         << fmt_opt(m.settling_time, 6) << ',' << fmt(m.steady_state_error, 6)
         << ',' << fmt(m.final_value, 6) << ',';
    } else {
      os << ",,,,," << row.note;
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace tanklab
