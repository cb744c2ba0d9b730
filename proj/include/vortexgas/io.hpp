#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "vortexgas/configuration.hpp"
#include "vortexgas/dynamics.hpp"
#include "vortexgas/error.hpp"

namespace vortexgas::io {

/// Locale-independent, round-trip exact (17 significant digits).
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  if (ec != std::errc{}) throw Error(ErrorCode::io_failure, "double formatting failed");
  return std::string(buf, end);
}

inline double parse_double(std::string_view s) {
  double x = 0.0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc{} || end != s.data() + s.size()) {
    throw Error(ErrorCode::config_parse, "not a number: '" + std::string(s) + "'");
  }
  return x;
}

inline long long parse_integer(std::string_view s) {
  long long x = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc{} || end != s.data() + s.size()) {
    throw Error(ErrorCode::config_parse, "not an integer: '" + std::string(s) + "'");
  }
  return x;
}

inline std::vector<std::string_view> split(std::string_view line, char sep = ',') {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline constexpr std::string_view kTrajectoryHeader = "time,vortex_index,charge,re,im";

inline void write_trajectory_row(std::ostream& os, double time, std::size_t index,
                                 const Vortex& v) {
  os << format_double(time) << ',' << index << ',' << v.charge << ','
     << format_double(v.position.real()) << ',' << format_double(v.position.imag()) << '\n';
}

/// Trajectory CSV: one row per vortex per output time.
inline void write_trajectory_csv(std::ostream& os, const std::vector<TrajectoryState>& states) {
  os << kTrajectoryHeader << '\n';
  for (const auto& s : states) {
    const auto vs = s.config.vortices();
    for (std::size_t i = 0; i < vs.size(); ++i) write_trajectory_row(os, s.time, i, vs[i]);
  }
}

struct TrajectoryFrame {
  double time = 0.0;
  std::vector<Vortex> vortices;
};

/// Reads a trajectory CSV back into frames grouped by time (rows must be
/// time-ordered).
inline std::vector<TrajectoryFrame> read_trajectory_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kTrajectoryHeader) {
    throw Error(ErrorCode::config_parse,
                "trajectory CSV must start with header '" + std::string(kTrajectoryHeader) + "'");
  }
  std::vector<TrajectoryFrame> frames;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 5) {
      throw Error(ErrorCode::config_parse,
                  "trajectory CSV line " + std::to_string(lineno) + ": expected 5 fields");
    }
    try {
      const double t = parse_double(f[0]);
      const Vortex v{{parse_double(f[3]), parse_double(f[4])}, parse_integer(f[2])};
      if (frames.empty() || frames.back().time != t) {
        if (!frames.empty() && t < frames.back().time) {
          throw Error(ErrorCode::config_parse, "times must be non-decreasing");
        }
        frames.push_back({t, {}});
      }
      frames.back().vortices.push_back(v);
    } catch (const Error& e) {
      throw Error(ErrorCode::config_parse,
                  "trajectory CSV line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return frames;
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::io_failure, "cannot open '" + path + "' for writing");
  os << content;
  if (!os) throw Error(ErrorCode::io_failure, "write to '" + path + "' failed");
}

inline std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::io_failure, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace vortexgas::io
