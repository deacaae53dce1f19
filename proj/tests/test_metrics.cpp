#include <doctest.h>

#include <tanklab/errors.hpp>
#include <tanklab/metrics.hpp>

#include <cmath>
#include <functional>
#include <numbers>

using namespace tanklab;

namespace {

// Synthesize a trace: setpoint fixed at `target` from step_time on, h2 given
// by a shape function of the time since the step (base level before).
Trace synth(double step_time, double target, double base, double duration,
            double dt, const std::function<double(double)>& shape) {
  Trace tr;
  for (std::size_t i = 0; double(i) * dt <= duration + 1e-12; ++i) {
    const double t = double(i) * dt;
    const bool after = t >= step_time - 1e-9;
    TraceRow r;
    r.t = t;
    r.setpoint = after ? target : 0.0;
    r.h2 = after ? base + shape(t - step_time) : base;
    tr.rows.push_back(r);
  }
  return tr;
}

constexpr double kRise19 = 10.986122886681098;  // tau * ln 9 for tau = 5

}  // namespace

TEST_CASE("first-order response: classic textbook figures") {
  const double amp = 6.0;
  const Trace tr = synth(0.0, 6.0, 0.0, 100.0, 0.01, [&](double t) {
    return amp * (1.0 - std::exp(-t / 5.0));
  });
  const StepMetrics m = step_metrics(tr, 0.0, 6.0);

  CHECK(m.overshoot_pct == 0.0);  // monotone approach never overshoots
  REQUIRE(m.rise_time.has_value());
  CHECK(*m.rise_time == doctest::Approx(kRise19).epsilon(1e-4));
  REQUIRE(m.settling_time.has_value());
  // Exits the 2%-of-final band at amp*e^{-t/5} = 0.02*amp: t = 5 ln 50.
  CHECK(*m.settling_time == doctest::Approx(5.0 * std::log(50.0)).epsilon(1e-3));
  CHECK(m.final_value == doctest::Approx(6.0).epsilon(1e-6));
  CHECK(m.steady_state_error < 1e-4);
}

TEST_CASE("second-order response: overshoot of a known damping ratio") {
  const double zeta = 0.4566;
  const double wd = std::sqrt(1.0 - zeta * zeta);
  const double phase0 = std::atan2(wd, zeta);
  const Trace tr = synth(0.0, 1.0, 0.0, 60.0, 0.001, [&](double t) {
    return 1.0 - std::exp(-zeta * t) / wd * std::sin(wd * t + phase0);
  });
  const StepMetrics m = step_metrics(tr, 0.0, 1.0);
  // exp(-pi*zeta/sqrt(1-zeta^2)) * 100 for zeta = 0.4566.
  CHECK(m.overshoot_pct == doctest::Approx(19.942102978249363).epsilon(1e-5));
  REQUIRE(m.rise_time.has_value());
  REQUIRE(m.settling_time.has_value());
  CHECK(*m.rise_time < *m.settling_time);
}

TEST_CASE("metrics are invariant under time shift and level translation") {
  const auto shape = [](double t) { return 6.0 * (1.0 - std::exp(-t / 5.0)); };
  const StepMetrics at_origin =
      step_metrics(synth(0.0, 6.0, 0.0, 100.0, 0.01, shape), 0.0, 6.0);
  const StepMetrics shifted =
      step_metrics(synth(20.0, 6.0, 0.0, 120.0, 0.01, shape), 20.0, 6.0);
  const StepMetrics translated =
      step_metrics(synth(20.0, 9.0, 3.0, 120.0, 0.01, shape), 20.0, 9.0);

  for (const StepMetrics& other : {shifted, translated}) {
    CHECK(other.overshoot_pct == doctest::Approx(at_origin.overshoot_pct));
    CHECK(*other.rise_time == doctest::Approx(*at_origin.rise_time).epsilon(1e-9));
    CHECK(*other.settling_time ==
          doctest::Approx(*at_origin.settling_time).epsilon(1e-9));
    CHECK(other.steady_state_error ==
          doctest::Approx(at_origin.steady_state_error).epsilon(1e-6));
  }
  CHECK(translated.final_value ==
        doctest::Approx(at_origin.final_value + 3.0).epsilon(1e-9));
}

TEST_CASE("a falling step works the same as a rising one") {
  const auto shape = [](double t) { return -6.0 * (1.0 - std::exp(-t / 5.0)); };
  const StepMetrics m =
      step_metrics(synth(0.0, 3.0, 9.0, 100.0, 0.01, shape), 0.0, 3.0);
  CHECK(m.overshoot_pct == 0.0);
  REQUIRE(m.rise_time.has_value());
  CHECK(*m.rise_time == doctest::Approx(kRise19).epsilon(1e-4));
  CHECK(m.final_value == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("a response that stalls below 90% has no rise time") {
  const Trace tr = synth(0.0, 6.0, 0.0, 100.0, 0.01, [](double t) {
    return 0.85 * 6.0 * (1.0 - std::exp(-t / 5.0));
  });
  const StepMetrics m = step_metrics(tr, 0.0, 6.0);
  CHECK_FALSE(m.rise_time.has_value());
  CHECK(m.settling_time.has_value());  // it does settle, just off target
  CHECK(m.steady_state_error == doctest::Approx(0.15 * 6.0).epsilon(1e-3));
}

TEST_CASE("a persistent oscillation never settles") {
  // Ends on a wave crest, far outside the settle band.
  const Trace tr = synth(20.0, 6.0, 0.0, 90.0, 0.01, [](double t) {
    return 6.0 + 1.2 * std::cos(2.0 * std::numbers::pi_v<double> * t / 7.0);
  });
  const StepMetrics m = step_metrics(tr, 20.0, 6.0);
  CHECK_FALSE(m.settling_time.has_value());
  CHECK(m.overshoot_pct > 15.0);
}

TEST_CASE("a flat trace that starts inside the band settles instantly") {
  const Trace tr = synth(0.0, 6.0, 5.95, 10.0, 0.1,
                         [](double) { return 0.04; });
  // Amplitude is 0.05; h2 sits at 5.99 throughout, final value 5.99.
  const StepMetrics m = step_metrics(tr, 0.0, 6.0);
  REQUIRE(m.settling_time.has_value());
  CHECK(*m.settling_time == 0.0);
}

TEST_CASE("steps the analyzer refuses") {
  const auto shape = [](double t) { return 6.0 * (1.0 - std::exp(-t / 5.0)); };
  const Trace tr = synth(0.0, 6.0, 0.0, 50.0, 0.01, shape);

  CHECK_THROWS_AS(step_metrics(Trace{}, 0.0, 6.0), NoStepFound);
  CHECK_THROWS_AS(step_metrics(tr, 60.0, 6.0), NoStepFound);   // beyond the end
  CHECK_THROWS_AS(step_metrics(tr, 0.0, 5.0), NoStepFound);    // wrong target
  CHECK_THROWS_AS(step_metrics(tr, 0.0, 6.0, 0.0), std::invalid_argument);

  // Zero amplitude: the level already sits at the target.
  const Trace flat = synth(0.0, 6.0, 6.0, 50.0, 0.01, [](double) { return 0.0; });
  CHECK_THROWS_AS(step_metrics(flat, 0.0, 6.0), NoStepFound);
}

TEST_CASE("scenario step extraction") {
  Scenario sc;
  sc.initial_state.h2 = 2.0;
  sc.setpoints = {{0.0, 6.0}};
  StepSpec s = scenario_step(sc);
  CHECK(s.time == 0.0);
  CHECK(s.target == 6.0);
  CHECK(s.amplitude == 4.0);  // measured from the initial level

  sc.setpoints = {{0.0, 3.0}, {40.0, 9.0}};
  s = scenario_step(sc);
  CHECK(s.time == 40.0);
  CHECK(s.target == 9.0);
  CHECK(s.amplitude == 6.0);  // measured from the previous knot

  sc.setpoints.clear();
  CHECK_THROWS_AS(scenario_step(sc), NoStepFound);
}

TEST_CASE("comparing identical controllers ties every figure") {
  const auto shape = [](double t) { return 6.0 * (1.0 - std::exp(-t / 5.0)); };
  const Trace tr = synth(0.0, 6.0, 0.0, 100.0, 0.01, shape);
  Scenario sc;
  sc.setpoints = {{0.0, 6.0}};

  const ComparisonReport rep = compare({{"a", tr}, {"b", tr}}, sc);
  REQUIRE(rep.verdicts.size() == 4);
  for (const auto& [figure, verdict] : rep.verdicts) {
    CHECK(verdict == "tie");
  }
}

TEST_CASE("the faster controller wins the timing figures") {
  const Trace fast = synth(0.0, 6.0, 0.0, 100.0, 0.01, [](double t) {
    return 6.0 * (1.0 - std::exp(-t / 5.0));
  });
  const Trace slow = synth(0.0, 6.0, 0.0, 100.0, 0.01, [](double t) {
    return 6.0 * (1.0 - std::exp(-t / 10.0));
  });
  Scenario sc;
  sc.setpoints = {{0.0, 6.0}};

  const ComparisonReport rep = compare({{"fast", fast}, {"slow", slow}}, sc);
  for (const auto& [figure, verdict] : rep.verdicts) {
    if (figure == "overshoot") {
      CHECK(verdict == "tie");  // both are exactly zero
    } else {
      CHECK(verdict == "fast");
    }
  }

  const std::string text = rep.to_text();
  CHECK(text.find("fast") != std::string::npos);
  CHECK(text.find("best rise_time: fast") != std::string::npos);

  const std::string csv = rep.to_csv();
  CHECK(csv.rfind("controller,overshoot_pct,rise_time_s,settling_time_s,"
                  "sse_cm,final_cm,note\n", 0) == 0);
}

TEST_CASE("a broken trace degrades its row instead of the report") {
  const auto shape = [](double t) { return 6.0 * (1.0 - std::exp(-t / 5.0)); };
  const Trace good = synth(0.0, 6.0, 0.0, 100.0, 0.01, shape);
  Scenario sc;
  sc.setpoints = {{0.0, 6.0}};

  const ComparisonReport rep =
      compare({{"good", good}, {"broken", Trace{}}}, sc);
  REQUIRE(rep.rows.size() == 2);
  CHECK(rep.rows[0].metrics.has_value());
  CHECK_FALSE(rep.rows[1].metrics.has_value());
  CHECK_FALSE(rep.rows[1].note.empty());
  // A single surviving contender cannot win anything.
  for (const auto& [figure, verdict] : rep.verdicts) {
    CHECK(verdict == "n/a");
  }
  CHECK(rep.to_text().find("analysis failed") != std::string::npos);
}

TEST_CASE("comparing nothing is an error") {
  Scenario sc;
  sc.setpoints = {{0.0, 6.0}};
  CHECK_THROWS_AS(compare({}, sc), std::invalid_argument);
}
