#pragma once

#include <cstdint>
#include <vector>

#include "decaylab/population.hpp"
#include "decaylab/rates.hpp"

namespace decaylab {

/// Full description of one experiment.
struct Scenario {
  std::int64_t n0 = 1;
  RateSet rates{1.0, 1.0};
  Mode mode = Mode::Entangled();
  double t_max = 10.0;
  std::size_t grid_points = 512;
  std::uint64_t seed = 0;
  bool parallel = true;

  void validate() const {
    if (n0 < 1) throw DomainError("n0 must be at least 1");
    if (!(t_max > 0.0) || !std::isfinite(t_max)) throw DomainError("t_max must be positive");
    if (grid_points < 2) throw DomainError("grid_points must be at least 2");
  }

  [[nodiscard]] std::vector<double> grid() const { return uniform_grid(t_max, grid_points); }
};

}  // namespace decaylab
