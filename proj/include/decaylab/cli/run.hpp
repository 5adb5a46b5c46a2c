#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "decaylab/analyzer.hpp"
#include "decaylab/cli/config.hpp"
#include "decaylab/cli/io.hpp"
#include "decaylab/kinetics.hpp"
#include "decaylab/montecarlo.hpp"

namespace decaylab::cli {

struct RunOptions {
  unsigned threads = 0;  // 0 = auto
  bool quiet = false;
};

namespace detail {

inline nlohmann::json complex_json(Complex w) {
  return {{"re", w.real()}, {"im", w.imag()}, {"text", format_complex(w)}};
}

inline nlohmann::json estimate_json(const std::optional<Estimate>& e) {
  if (!e) return nullptr;
  return {{"value", e->value}, {"std_error", e->std_error}, {"samples", e->samples}};
}

}  // namespace detail

/// Runs every emitted stage and writes the output files. Throws on failure;
/// see run_and_report for the exit-code mapping.
inline nlohmann::json run(const RunConfig& cfg, const RunOptions& options = {},
                          std::ostream& log = std::clog) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(cfg.out, ec);
  if (ec || !fs::is_directory(cfg.out)) {
    throw IoError("cannot create output directory '" + cfg.out.string() + "'");
  }
  if (!options.quiet) {
    for (const std::string& w : cfg.warnings) log << "warning: " << w << '\n';
  }

  const Scenario& sc = cfg.scenario;
  sc.validate();
  const RateSet& rates = sc.rates;
  const EntangledRates er = derive_rates(rates);

  nlohmann::json summary;
  summary["scenario"] = {{"n0", sc.n0},           {"mode", to_string(sc.mode)},
                         {"t_max", sc.t_max},     {"grid_points", sc.grid_points},
                         {"seed", sc.seed},       {"parallel", sc.parallel}};
  summary["rates"] = {{"gamma_or", rates.gamma_or()},
                      {"gamma_pa", rates.gamma_pa()},
                      {"w_or", detail::complex_json(rates.w_or())},
                      {"w_pa", detail::complex_json(rates.w_pa())},
                      {"gamma_t_or", er.gamma_t_or},
                      {"gamma_t_pa", er.gamma_t_pa},
                      {"gamma_t", er.gamma_t},
                      {"lambda", er.lambda},
                      {"lambda_paper_literal", lambda_paper_literal(rates)},
                      {"relative_modification_or", relative_modification(rates.w_pa())},
                      {"relative_modification_pa", relative_modification(rates.w_or())}};
  summary["warnings"] = cfg.warnings;

  double conservation = 0.0;
  const std::vector<double> grid = sc.grid();

  if (cfg.emits(Stage::Lifetimes)) {
    const LifetimeReport lr = lifetime_report(rates, cfg.lifetime_tol);
    summary["lifetimes"] = {{"tau_or", lr.tau_or},
                            {"tau_pa", lr.tau_pa},
                            {"tau_tilde_state", lr.tau_tilde_state},
                            {"tau_tilde_or", lr.tau_tilde_or},
                            {"tau_tilde_pa", lr.tau_tilde_pa},
                            {"solver_residual", lr.solver_residual}};
  }

  if (cfg.emits(Stage::Analytic)) {
    const PopulationCurve curve = evaluate_curve(grid, static_cast<double>(sc.n0), rates, sc.mode);
    conservation = std::max(conservation, curve.max_conservation_error());
    write_file(cfg.out / "analytic.csv", [&](std::ostream& os) { write_curve_csv(os, curve); });
  }

  const bool needs_stream = cfg.emits(Stage::MonteCarlo) || cfg.emits(Stage::Reconstruction) ||
                            cfg.emits(Stage::Detection);
  if (needs_stream) {
    std::vector<PhotonEvent> events;
    if (cfg.events_in) {
      std::ifstream is(*cfg.events_in, std::ios::binary);
      if (!is) throw IoError("cannot open events file '" + cfg.events_in->string() + "'");
      events = read_events_csv(is);
    } else {
      SimulationResult sim = simulate(sc, options.threads);
      events = std::move(sim.events);
      if (cfg.emits(Stage::MonteCarlo)) {
        conservation = std::max(conservation, sim.curve.max_conservation_error());
        write_file(cfg.out / "empirical.csv", [&](std::ostream& os) { write_curve_csv(os, sim.curve); });
      }
    }
    if (cfg.emits(Stage::MonteCarlo) && !cfg.events_in) {
      write_file(cfg.out / "events.csv", [&](std::ostream& os) { write_events_csv(os, events); });
    }
    if (cfg.emits(Stage::Reconstruction)) {
      const CountCurve rec = reconstruct(classify(events, grid, sc.n0));
      conservation = std::max(conservation, rec.max_conservation_error());
      write_file(cfg.out / "reconstruction.csv", [&](std::ostream& os) { write_curve_csv(os, rec); });
      try {
        const RateEstimates est = estimate_rates(events, sc.n0, cfg.min_pairs);
        summary["estimates"] = {{"gamma_t", detail::estimate_json(est.gamma_t)},
                                {"gamma_t_or", detail::estimate_json(est.gamma_t_or)},
                                {"gamma_t_pa", detail::estimate_json(est.gamma_t_pa)},
                                {"gamma_or", detail::estimate_json(est.gamma_or)},
                                {"gamma_pa", detail::estimate_json(est.gamma_pa)}};
      } catch (const InsufficientDataError& e) {
        summary["estimates"] = {{"error", e.name()}, {"message", e.what()}};
      }
    }
    if (cfg.emits(Stage::Detection)) {
      const RateSet reference = cfg.reference_rates();
      const DetectionVerdict v =
          detect(events, sc.n0, reference, DetectOptions{cfg.detect_threshold, cfg.min_pairs});
      nlohmann::json by_species = nlohmann::json::object();
      nlohmann::json fitted = nlohmann::json::object();
      for (Species h : kAllSpecies) {
        const auto& s = v.species_statistic[index(h)];
        by_species[std::string(to_string(h))] = s ? nlohmann::json(*s) : nlohmann::json(nullptr);
        fitted[std::string(to_string(h))] = detail::estimate_json(v.fitted_rates[index(h)]);
      }
      summary["detection"] = {{"verdict", std::string(to_string(v.verdict))},
                              {"statistic", v.statistic},
                              {"threshold", v.threshold},
                              {"species_statistic", by_species},
                              {"fitted_rates", fitted},
                              {"reference_gamma_or", reference.gamma_or()},
                              {"reference_gamma_pa", reference.gamma_pa()}};
    }
  }

  summary["conservation_max_error"] = conservation;
  write_file(cfg.out / "summary.json", [&](std::ostream& os) { os << summary.dump(2) << '\n'; });
  return summary;
}

enum ExitCode : int { kOk = 0, kUsage = 1, kIo = 2, kCompute = 3 };

/// Writes a one-line JSON error record to `err` (and error.json when the
/// output directory is usable).
inline void report_error(std::ostream& err, const std::filesystem::path& out, const char* name,
                         const std::string& message, int code) {
  const nlohmann::json record = {{"error", name}, {"message", message}, {"exit_code", code}};
  err << record.dump() << '\n';
  std::error_code ec;
  if (std::filesystem::is_directory(out, ec)) {
    std::ofstream os(out / "error.json");
    if (os) os << record.dump(2) << '\n';
  }
}

[[nodiscard]] inline int exit_code_for(const Error& e) {
  if (dynamic_cast<const ParseError*>(&e)) return kUsage;
  if (dynamic_cast<const IoError*>(&e)) return kIo;
  return kCompute;
}

inline int run_and_report(const RunConfig& cfg, const RunOptions& options, std::ostream& err) {
  try {
    run(cfg, options, err);
    return kOk;
  } catch (const Error& e) {
    const int code = exit_code_for(e);
    report_error(err, cfg.out, e.name(), e.what(), code);
    return code;
  } catch (const std::filesystem::filesystem_error& e) {
    report_error(err, cfg.out, "io_error", e.what(), kIo);
    return kIo;
  }
}

}  // namespace decaylab::cli
