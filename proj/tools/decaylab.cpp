// decaylab: analytic, Monte Carlo and detection pipeline for entangled
// metastable pairs. Configuration is a key=value file; see README.md.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "decaylab/cli/config.hpp"
#include "decaylab/cli/run.hpp"

namespace {

unsigned threads_from_env() {
  const char* env = std::getenv("DECAYLAB_THREADS");
  if (env == nullptr || *env == '\0') return 0;
  try {
    return static_cast<unsigned>(std::stoul(env));
  } catch (const std::exception&) {
    std::cerr << "warning: ignoring unparsable DECAYLAB_THREADS='" << env << "'\n";
    return 0;
  }
}

}  // namespace

int main(int argc, char** argv) {
  namespace cli = decaylab::cli;

  CLI::App app{"Decay kinetics of entangled metastable atom pairs"};
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  app.add_option("--config", config_path, "key=value configuration file")->required();
  app.add_option("--out", out_dir, "output directory (overrides config 'out')");
  app.add_option("--seed", seed, "RNG seed (overrides config 'seed')");
  app.add_flag("--quiet", quiet, "suppress warnings");
  CLI11_PARSE(app, argc, argv);

  std::ifstream in(config_path, std::ios::binary);
  if (!in) {
    cli::report_error(std::cerr, out_dir.empty() ? "." : out_dir, "io_error",
                      "cannot read config '" + config_path + "'", cli::kIo);
    return cli::kIo;
  }
  std::ostringstream text;
  text << in.rdbuf();

  cli::RunConfig cfg;
  try {
    cfg = cli::parse_config(text.str());
  } catch (const decaylab::Error& e) {
    cli::report_error(std::cerr, out_dir.empty() ? "." : out_dir, e.name(), e.what(), cli::kUsage);
    return cli::kUsage;
  }
  if (!out_dir.empty()) cfg.out = out_dir;
  if (seed) cfg.scenario.seed = *seed;

  const cli::RunOptions options{threads_from_env(), quiet};
  return cli::run_and_report(cfg, options, std::cerr);
}
