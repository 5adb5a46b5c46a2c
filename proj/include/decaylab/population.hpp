#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "decaylab/errors.hpp"
#include "decaylab/species.hpp"

namespace decaylab {

/// Whether the ensemble starts as entangled pairs or as lone atoms of one
/// species (product state).
struct Mode {
  bool entangled = true;
  Species product_species = Species::Pa;

  [[nodiscard]] static constexpr Mode Entangled() noexcept { return {}; }
  [[nodiscard]] static constexpr Mode Product(Species h) noexcept { return {false, h}; }

  /// Photons eventually emitted per initial unit (pair or atom).
  [[nodiscard]] constexpr int photons_per_unit() const noexcept { return entangled ? 2 : 1; }

  friend constexpr bool operator==(const Mode&, const Mode&) = default;
};

/// Checks that a time grid is non-empty, finite, non-negative and strictly
/// increasing.
inline void validate_grid(std::span<const double> grid) {
  if (grid.empty()) throw DomainError("time grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i]) || grid[i] < 0.0) {
      throw DomainError("time grid values must be finite and non-negative");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw DomainError("time grid must be strictly increasing");
    }
  }
}

/// Uniform grid on [0, t_max] with `points` nodes.
[[nodiscard]] inline std::vector<double> uniform_grid(double t_max, std::size_t points) {
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw DomainError("t_max must be positive");
  if (points < 2) throw DomainError("a uniform grid needs at least 2 points");
  std::vector<double> grid(points);
  const double dt = t_max / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) grid[i] = dt * static_cast<double>(i);
  grid.back() = t_max;
  return grid;
}

/// Time series of the pair population n, the single-atom populations n_h and
/// the cumulative photon counts N_h. `T` is double for analytic expectations
/// and std::int64_t for Monte Carlo histograms.
///
/// In product mode `n` holds the surviving lone atoms and n_or = n_pa = 0.
template <class T>
struct BasicPopulationCurve {
  using value_type = T;

  std::vector<double> grid;
  std::vector<T> n;
  std::vector<T> n_or;
  std::vector<T> n_pa;
  std::vector<T> cap_n_or;
  std::vector<T> cap_n_pa;
  T n0{};
  Mode mode{};

  BasicPopulationCurve() = default;
  BasicPopulationCurve(std::vector<double> g, T initial, Mode m)
      : grid(std::move(g)),
        n(grid.size(), T{}),
        n_or(grid.size(), T{}),
        n_pa(grid.size(), T{}),
        cap_n_or(grid.size(), T{}),
        cap_n_pa(grid.size(), T{}),
        n0(initial),
        mode(m) {}

  [[nodiscard]] std::size_t size() const noexcept { return grid.size(); }

  [[nodiscard]] std::vector<T>& single(Species h) noexcept { return h == Species::Or ? n_or : n_pa; }
  [[nodiscard]] const std::vector<T>& single(Species h) const noexcept {
    return h == Species::Or ? n_or : n_pa;
  }
  [[nodiscard]] std::vector<T>& photons(Species h) noexcept {
    return h == Species::Or ? cap_n_or : cap_n_pa;
  }
  [[nodiscard]] const std::vector<T>& photons(Species h) const noexcept {
    return h == Species::Or ? cap_n_or : cap_n_pa;
  }

  /// N_or + N_pa + k·n + n_or + n_pa − k·n0 at grid point i, with k photons
  /// per unit (2 for pairs, 1 for lone atoms).
  [[nodiscard]] T conservation_defect(std::size_t i) const {
    const T k = static_cast<T>(mode.photons_per_unit());
    return cap_n_or[i] + cap_n_pa[i] + k * n[i] + n_or[i] + n_pa[i] - k * n0;
  }

  /// Largest |conservation_defect| over the grid divided by n0.
  [[nodiscard]] double max_conservation_error() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
      worst = std::max(worst, std::abs(static_cast<double>(conservation_defect(i))));
    }
    return n0 == T{} ? worst : worst / static_cast<double>(n0);
  }

  friend bool operator==(const BasicPopulationCurve&, const BasicPopulationCurve&) = default;
};

using PopulationCurve = BasicPopulationCurve<double>;
using CountCurve = BasicPopulationCurve<std::int64_t>;

}  // namespace decaylab
