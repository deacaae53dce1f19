#include "tanklab/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tanklab {

namespace {

std::string header_line() {
  std::string h;
  for (std::size_t i = 0; i < Trace::kColumns.size(); ++i) {
    if (i > 0) h += ',';
    h += Trace::kColumns[i];
  }
  return h;
}

double parse_field(std::string_view field, std::size_t line_no) {
  double value = 0.0;
  const auto* begin = field.data();
  const auto* end = begin + field.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
    throw std::runtime_error("csv line " + std::to_string(line_no) +
                             ": bad number '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace

std::string format_double(double value) {
  std::array<char, 32> buf;
  const auto [ptr, ec] =
      std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw std::runtime_error("double formatting failed");
  return std::string(buf.data(), ptr);
}

void write_trace_csv(const Trace& trace, std::ostream& out) {
  out << header_line() << '\n';
  for (const auto& r : trace.rows) {
    out << format_double(r.t) << ',' << format_double(r.setpoint) << ','
        << format_double(r.h1) << ',' << format_double(r.h2) << ','
        << format_double(r.q_commanded) << ',' << format_double(r.q_actuator)
        << ',' << format_double(r.error) << ',' << format_double(r.kp) << ','
        << format_double(r.ki) << ',' << format_double(r.kd) << '\n';
  }
}

void write_trace_csv_file(const Trace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_trace_csv(trace, out);
  out.flush();
  if (!out) throw std::runtime_error("failed writing " + path);
}

Trace read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("csv is empty");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header_line()) {
    throw std::runtime_error("csv header mismatch, expected '" +
                             header_line() + "'");
  }

  Trace trace;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    std::array<double, 10> v{};
    std::string_view rest = line;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const auto comma = rest.find(',');
      const bool last = i + 1 == v.size();
      if (last != (comma == std::string_view::npos)) {
        throw std::runtime_error("csv line " + std::to_string(line_no) +
                                 ": expected 10 fields");
      }
      v[i] = parse_field(last ? rest : rest.substr(0, comma), line_no);
      if (!last) rest.remove_prefix(comma + 1);
    }
    trace.rows.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7],
                          v[8], v[9]});
  }
  return trace;
}

Trace read_trace_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_trace_csv(in);
}

}  // namespace tanklab
