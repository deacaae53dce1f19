#pragma once

#include <iosfwd>
#include <string>

#include "tanklab/sim.hpp"

namespace tanklab {

/// Shortest decimal representation that round-trips the double exactly.
std::string format_double(double value);

/// Write a trace as CSV: the fixed header
/// `t,setpoint,h1,h2,q_commanded,q_actuator,error,kp,ki,kd` followed by one
/// row per sample, values formatted with format_double.
void write_trace_csv(const Trace& trace, std::ostream& out);

/// Convenience wrapper writing to a file; throws std::runtime_error when the
/// file cannot be opened.
void write_trace_csv_file(const Trace& trace, const std::string& path);

/// Parse a trace written by write_trace_csv.  The header must match the
/// fixed column list exactly; every row must hold ten finite numbers.
/// Throws std::runtime_error on malformed input.
Trace read_trace_csv(std::istream& in);

/// Convenience wrapper reading from a file; throws std::runtime_error when
/// the file cannot be opened.
Trace read_trace_csv_file(const std::string& path);

}  // namespace tanklab
