#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "decaylab/cli/config.hpp"
#include "decaylab/errors.hpp"
#include "decaylab/montecarlo.hpp"
#include "decaylab/population.hpp"

namespace decaylab::cli {

inline constexpr const char* kCurveHeader = "t,n,n_or,n_pa,N_or,N_pa";
inline constexpr const char* kEventsHeader = "pair_id,time,species,side,order";

/// %.17g: round-trips every double.
[[nodiscard]] inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

template <class T>
[[nodiscard]] std::string format_value(T x) {
  if constexpr (std::is_integral_v<T>) {
    return std::to_string(x);
  } else {
    return format_double(x);
  }
}

template <class T>
void write_curve_csv(std::ostream& os, const BasicPopulationCurve<T>& c) {
  os << kCurveHeader << '\n';
  for (std::size_t i = 0; i < c.size(); ++i) {
    os << format_double(c.grid[i]) << ',' << format_value(c.n[i]) << ',' << format_value(c.n_or[i])
       << ',' << format_value(c.n_pa[i]) << ',' << format_value(c.cap_n_or[i]) << ','
       << format_value(c.cap_n_pa[i]) << '\n';
  }
}

/// Cloud events leave pair_id and order blank.
inline void write_events_csv(std::ostream& os, std::span<const PhotonEvent> events) {
  os << kEventsHeader << '\n';
  for (const PhotonEvent& e : events) {
    if (e.pair_id) os << *e.pair_id;
    os << ',' << format_double(e.time) << ',' << to_string(e.species) << ',' << to_string(e.side)
       << ',';
    if (e.order) os << to_string(*e.order);
    os << '\n';
  }
}

[[nodiscard]] inline std::vector<PhotonEvent> read_events_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || detail::trim(line) != kEventsHeader) {
    throw ParseError(std::string("events file must start with header '") + kEventsHeader + "'");
  }
  std::vector<PhotonEvent> events;
  int line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest = line;
    for (;;) {
      const auto comma = rest.find(',');
      fields.push_back(detail::trim(rest.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    try {
      if (fields.size() != 5) throw ParseError("expected 5 fields");
      PhotonEvent e;
      if (!fields[0].empty()) e.pair_id = detail::parse_integer<std::uint64_t>(fields[0]);
      e.time = detail::parse_double(fields[1]);
      e.species = parse_species(fields[2]);
      e.side = parse_side(fields[3]);
      if (!fields[4].empty()) e.order = parse_order(fields[4]);
      events.push_back(e);
    } catch (const Error& err) {
      throw ParseError("events line " + std::to_string(line_no) + ": " + err.what());
    }
  }
  return events;
}

[[nodiscard]] inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  return os;
}

template <class Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
  std::ofstream os = open_output(path);
  writer(os);
  os.flush();
  if (!os) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace decaylab::cli
