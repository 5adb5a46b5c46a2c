#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "decaylab/errors.hpp"
#include "decaylab/kinetics.hpp"
#include "decaylab/rates.hpp"
#include "decaylab/scenario.hpp"

namespace decaylab::cli {

enum class Stage { Analytic, MonteCarlo, Reconstruction, Detection, Lifetimes };

inline constexpr std::array<std::pair<std::string_view, Stage>, 5> kStageNames{{
    {"analytic", Stage::Analytic},
    {"montecarlo", Stage::MonteCarlo},
    {"reconstruction", Stage::Reconstruction},
    {"detection", Stage::Detection},
    {"lifetimes", Stage::Lifetimes},
}};

struct RunConfig {
  Scenario scenario;
  std::filesystem::path out = ".";
  std::set<Stage> emit;
  double lifetime_tol = 1e-12;
  double detect_threshold = 0.0;  // 0 = default 3·1.36/√n0
  std::int64_t min_pairs = 100;
  /// Free-atom rates the detection compares against; defaults to the
  /// scenario's own Γ_or, Γ_pa.
  std::optional<RateSet> reference;
  /// Event stream to analyze instead of simulating one.
  std::optional<std::filesystem::path> events_in;
  std::vector<std::string> warnings;

  [[nodiscard]] bool emits(Stage s) const { return emit.contains(s); }
  [[nodiscard]] RateSet reference_rates() const { return reference.value_or(scenario.rates); }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && ws(s.back())) s.remove_suffix(1);
  return s;
}

inline double parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ParseError("not a number: '" + std::string(s) + "'");
  }
  return value;
}

template <class Int>
Int parse_integer(std::string_view s) {
  s = trim(s);
  Int value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ParseError("not an integer: '" + std::string(s) + "'");
  }
  return value;
}

inline bool parse_bool(std::string_view s) {
  s = trim(s);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ParseError("not a boolean: '" + std::string(s) + "'");
}

}  // namespace detail

/// Parses "a", "bi", "a+bi" or "a-bi" (exponents allowed, "i" alone is 1i).
[[nodiscard]] inline Complex parse_complex(std::string_view text) {
  const std::string_view s = detail::trim(text);
  if (s.empty()) throw ParseError("empty complex number");
  if (s.back() != 'i') return {detail::parse_double(s), 0.0};

  const std::string_view body = s.substr(0, s.size() - 1);
  std::size_t split = std::string_view::npos;
  for (std::size_t i = body.size(); i-- > 1;) {
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  const auto imag_part = [](std::string_view v) {
    if (v.empty() || v == "+") return 1.0;
    if (v == "-") return -1.0;
    return detail::parse_double(v);
  };
  if (split == std::string_view::npos) return {0.0, imag_part(body)};
  return {detail::parse_double(body.substr(0, split)), imag_part(body.substr(split))};
}

/// Shortest-exact "a+bi" rendering (17 significant digits).
[[nodiscard]] inline std::string format_complex(Complex w) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.17g%+.17gi", w.real(), w.imag());
  return buf;
}

inline Mode parse_mode(std::string_view s, Species default_product) {
  s = detail::trim(s);
  if (s == "entangled") return Mode::Entangled();
  if (s == "product") return Mode::Product(default_product);
  if (s == "product:or" || s == "product_or") return Mode::Product(Species::Or);
  if (s == "product:pa" || s == "product_pa") return Mode::Product(Species::Pa);
  throw ParseError("unknown mode '" + std::string(s) + "'");
}

[[nodiscard]] inline std::string to_string(Mode m) {
  return m.entangled ? "entangled" : "product:" + std::string(to_string(m.product_species));
}

/// Γ̃_h above this multiple of Γ_h draws a warning: W is meant to be small.
inline constexpr double kLargeModification = 1e3;

/// Reads the flat `key=value` format (`#` starts a comment). Required keys:
/// n0, gamma_or, gamma_pa.
[[nodiscard]] inline RunConfig parse_config(std::string_view text) {
  std::map<std::string, std::pair<std::string, int>> kv;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  static const std::set<std::string, std::less<>> known{
      "n0",        "gamma_or",    "gamma_pa",   "w_or",         "w_pa",
      "mode",      "product_species", "t_max",  "grid_points",  "seed",
      "parallel",  "emit",        "out",        "lifetime_tol", "detect_threshold",
      "min_pairs", "reference_gamma_or", "reference_gamma_pa", "events_in"};
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key{detail::trim(line.substr(0, eq))};
    const std::string value{detail::trim(line.substr(eq + 1))};
    if (!known.contains(key)) {
      throw ParseError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    if (kv.contains(key)) {
      throw ParseError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    kv[key] = {value, line_no};
  }

  const auto get = [&](const char* key) -> std::optional<std::string> {
    const auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    return it->second.first;
  };
  const auto with_line = [&](const char* key, auto&& fn) {
    try {
      return fn(kv.at(key).first);
    } catch (const Error& e) {
      throw ParseError("line " + std::to_string(kv.at(key).second) + ": " + key + ": " + e.what());
    }
  };
  for (const char* required : {"n0", "gamma_or", "gamma_pa"}) {
    if (!kv.contains(required)) throw ParseError(std::string("missing required key '") + required + "'");
  }

  RunConfig cfg;
  const auto positive_rate = [](const std::string& v) {
    const double g = detail::parse_double(v);
    if (!(g > 0.0) || !std::isfinite(g)) throw ParseError("rate must be positive");
    return g;
  };
  const double gamma_or = with_line("gamma_or", positive_rate);
  const double gamma_pa = with_line("gamma_pa", positive_rate);
  const Complex w_or = get("w_or") ? with_line("w_or", parse_complex) : Complex{};
  const Complex w_pa = get("w_pa") ? with_line("w_pa", parse_complex) : Complex{};
  try {
    cfg.scenario.rates = RateSet(gamma_or, gamma_pa, w_or, w_pa);
  } catch (const DomainError& e) {
    throw ParseError(e.what());
  }

  cfg.scenario.n0 = with_line("n0", [](const std::string& v) {
    const auto n = detail::parse_integer<std::int64_t>(v);
    if (n < 1) throw ParseError("n0 must be at least 1");
    return n;
  });

  Species product_species = Species::Pa;
  if (get("product_species")) {
    product_species = with_line("product_species", [](const std::string& v) { return parse_species(v); });
  }
  if (get("mode")) {
    cfg.scenario.mode = with_line("mode", [&](const std::string& v) { return parse_mode(v, product_species); });
  }
  cfg.scenario.t_max = get("t_max") ? with_line("t_max", [](const std::string& v) {
    const double t = detail::parse_double(v);
    if (!(t > 0.0) || !std::isfinite(t)) throw ParseError("t_max must be positive");
    return t;
  })
                                    : 10.0 / std::min(gamma_or, gamma_pa);
  if (get("grid_points")) {
    cfg.scenario.grid_points = with_line("grid_points", [](const std::string& v) {
      const auto g = detail::parse_integer<std::size_t>(v);
      if (g < 2) throw ParseError("grid_points must be at least 2");
      return g;
    });
  }
  if (get("seed")) cfg.scenario.seed = with_line("seed", detail::parse_integer<std::uint64_t>);
  if (get("parallel")) cfg.scenario.parallel = with_line("parallel", detail::parse_bool);
  if (get("out")) cfg.out = *get("out");
  if (get("events_in")) cfg.events_in = std::filesystem::path(*get("events_in"));
  if (get("lifetime_tol")) {
    cfg.lifetime_tol = with_line("lifetime_tol", [](const std::string& v) {
      const double t = detail::parse_double(v);
      if (!(t > 0.0)) throw ParseError("lifetime_tol must be positive");
      return t;
    });
  }
  if (get("detect_threshold")) {
    cfg.detect_threshold = with_line("detect_threshold", [](const std::string& v) {
      const double t = detail::parse_double(v);
      if (!(t > 0.0)) throw ParseError("detect_threshold must be positive");
      return t;
    });
  }
  if (get("min_pairs")) cfg.min_pairs = with_line("min_pairs", detail::parse_integer<std::int64_t>);
  if (get("reference_gamma_or") || get("reference_gamma_pa")) {
    const double ro = get("reference_gamma_or") ? with_line("reference_gamma_or", positive_rate) : gamma_or;
    const double rp = get("reference_gamma_pa") ? with_line("reference_gamma_pa", positive_rate) : gamma_pa;
    cfg.reference = RateSet(ro, rp);
  }

  if (get("emit")) {
    with_line("emit", [&](const std::string& v) {
      std::string_view rest = v;
      while (!rest.empty()) {
        const auto comma = rest.find(',');
        const std::string_view item = detail::trim(rest.substr(0, comma));
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        if (item.empty()) continue;
        const auto it = std::find_if(kStageNames.begin(), kStageNames.end(),
                                     [&](const auto& p) { return p.first == item; });
        if (it == kStageNames.end()) throw ParseError("unknown stage '" + std::string(item) + "'");
        cfg.emit.insert(it->second);
      }
      if (cfg.emit.empty()) throw ParseError("emit must name at least one stage");
      return 0;
    });
  } else {
    for (const auto& [name, stage] : kStageNames) cfg.emit.insert(stage);
  }

  for (Species h : kAllSpecies) {
    const double factor = std::norm(1.0 + cfg.scenario.rates.w(companion(h)));
    if (factor > kLargeModification) {
      cfg.warnings.push_back("|1+W|^2 = " + std::to_string(factor) + " makes the entangled " +
                             std::string(to_string(h)) + " rate exceed 1e3 times the free rate");
    }
  }
  return cfg;
}

}  // namespace decaylab::cli
