#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "decaylab/errors.hpp"
#include "decaylab/montecarlo.hpp"
#include "decaylab/population.hpp"
#include "decaylab/rates.hpp"

namespace decaylab {

/// Cumulative photon counts split by emission order: n1_h = N_h^(1)(t)
/// (disentangling photons), n2_h = N_h^(2)(t) (photons of surviving atoms).
struct ClassifiedCounts {
  std::vector<double> grid;
  std::vector<std::int64_t> n1_or;
  std::vector<std::int64_t> n1_pa;
  std::vector<std::int64_t> n2_or;
  std::vector<std::int64_t> n2_pa;
  std::int64_t n0 = 0;
  /// Inferred from the stream: entangled unless every photon is a lone First.
  Mode mode = Mode::Entangled();

  [[nodiscard]] const std::vector<std::int64_t>& first(Species h) const noexcept {
    return h == Species::Or ? n1_or : n1_pa;
  }
  [[nodiscard]] const std::vector<std::int64_t>& second(Species h) const noexcept {
    return h == Species::Or ? n2_or : n2_pa;
  }
};

/// Tags photons first/second using pair identity. Cloud data (no pair_id or
/// no order) cannot be classified.
[[nodiscard]] inline ClassifiedCounts classify(std::span<const PhotonEvent> events,
                                               std::span<const double> grid, std::int64_t n0) {
  validate_grid(grid);
  if (n0 < 1) throw DomainError("n0 must be at least 1");
  const std::size_t m = grid.size();
  const auto n0u = static_cast<std::uint64_t>(n0);

  struct Seen {
    double first = -1.0;
    double second = -1.0;
    Species first_species = Species::Or;
    Species second_species = Species::Or;
  };
  std::vector<Seen> seen(n0u);
  std::array<std::vector<std::int64_t>, 4> diff;  // n1_or, n1_pa, n2_or, n2_pa
  for (auto& d : diff) d.assign(m + 1, 0);
  bool any_second = false;

  for (const PhotonEvent& e : events) {
    if (!e.pair_id || !e.order) {
      throw UnclassifiableError("photon without pair identity: first/second cannot be assigned");
    }
    if (!(e.time >= 0.0) || std::isinf(e.time)) throw DataError("event time must be finite and non-negative");
    if (*e.pair_id >= n0u) throw DataError("pair_id out of range");
    Seen& s = seen[*e.pair_id];
    const auto k = static_cast<std::size_t>(std::lower_bound(grid.begin(), grid.end(), e.time) - grid.begin());
    if (*e.order == Order::First) {
      if (s.first >= 0.0) throw DataError("pair has two first emissions");
      s.first = e.time;
      s.first_species = e.species;
      diff[index(e.species)][k] += 1;
    } else {
      if (s.second >= 0.0) throw DataError("pair has two second emissions");
      s.second = e.time;
      s.second_species = e.species;
      diff[2 + index(e.species)][k] += 1;
      any_second = true;
    }
  }
  for (const Seen& s : seen) {
    if (s.second < 0.0) continue;
    if (s.first < 0.0) throw DataError("second emission without a first");
    if (s.second < s.first) throw DataError("second emission precedes first");
    if (s.second_species != companion(s.first_species)) {
      throw DataError("second photon must be the companion species");
    }
  }

  ClassifiedCounts counts;
  counts.grid.assign(grid.begin(), grid.end());
  counts.n0 = n0;
  if (!events.empty() && !any_second) {
    const Species h = events.front().species;
    counts.mode = Mode::Product(h);
  }
  std::array<std::vector<std::int64_t>*, 4> out{&counts.n1_or, &counts.n1_pa, &counts.n2_or,
                                                &counts.n2_pa};
  for (std::size_t c = 0; c < 4; ++c) {
    out[c]->resize(m);
    std::int64_t running = 0;
    for (std::size_t k = 0; k < m; ++k) {
      running += diff[c][k];
      (*out[c])[k] = running;
    }
  }
  return counts;
}

/// Populations from classified photon counts:
///   n = n0 − N_or^(1) − N_pa^(1),  n_h = N_H^(1) − N_h^(2),  N_h = N_h^(1) + N_h^(2).
[[nodiscard]] inline CountCurve reconstruct(const ClassifiedCounts& counts) {
  CountCurve curve(counts.grid, counts.n0, counts.mode);
  for (std::size_t k = 0; k < counts.grid.size(); ++k) {
    curve.n[k] = counts.n0 - counts.n1_or[k] - counts.n1_pa[k];
    if (curve.n[k] < 0) throw DataError("reconstructed pair count is negative");
    for (Species h : kAllSpecies) {
      const std::int64_t single =
          counts.mode.entangled ? counts.first(companion(h))[k] - counts.second(h)[k] : 0;
      if (single < 0) throw DataError("reconstructed single-atom count is negative");
      curve.single(h)[k] = single;
      curve.photons(h)[k] = counts.first(h)[k] + counts.second(h)[k];
    }
  }
  return curve;
}

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t samples = 0;
};

/// Exponential maximum-likelihood estimates. Entangled streams give Γ̃ from
/// the first-emission times, its species split from the first-photon
/// species, and Γ_h from the first-to-second gaps. Product streams only
/// give Γ_h.
struct RateEstimates {
  std::optional<Estimate> gamma_t;
  std::optional<Estimate> gamma_t_or;
  std::optional<Estimate> gamma_t_pa;
  std::optional<Estimate> gamma_or;
  std::optional<Estimate> gamma_pa;

  [[nodiscard]] const std::optional<Estimate>& gamma(Species h) const noexcept {
    return h == Species::Or ? gamma_or : gamma_pa;
  }
  [[nodiscard]] const std::optional<Estimate>& gamma_t_species(Species h) const noexcept {
    return h == Species::Or ? gamma_t_or : gamma_t_pa;
  }
};

inline constexpr std::int64_t kDefaultMinPairs = 100;

namespace detail {

[[nodiscard]] inline std::optional<Estimate> rate_mle(std::int64_t count, double total_time) {
  if (count <= 0 || !(total_time > 0.0)) return std::nullopt;
  const double value = static_cast<double>(count) / total_time;
  return Estimate{value, value / std::sqrt(static_cast<double>(count)), count};
}

}  // namespace detail

[[nodiscard]] inline RateEstimates estimate_rates(std::span<const PhotonEvent> events,
                                                  std::int64_t n0,
                                                  std::int64_t min_pairs = kDefaultMinPairs) {
  struct Pair {
    double first = -1.0;
    double second = -1.0;
    Species first_species = Species::Or;
  };
  std::vector<Pair> pairs(static_cast<std::size_t>(std::max<std::int64_t>(n0, 0)));
  for (const PhotonEvent& e : events) {
    if (!e.pair_id || !e.order) throw UnclassifiableError("rate estimation needs pair identity");
    if (*e.pair_id >= pairs.size()) throw DataError("pair_id out of range");
    Pair& p = pairs[*e.pair_id];
    if (*e.order == Order::First) {
      p.first = e.time;
      p.first_species = e.species;
    } else {
      p.second = e.time;
    }
  }

  std::int64_t n_first = 0;
  std::array<std::int64_t, 2> first_by_species{0, 0};
  std::array<double, 2> first_time_by_species{0.0, 0.0};
  std::array<std::int64_t, 2> second_by_species{0, 0};
  std::array<double, 2> gap_by_species{0.0, 0.0};
  double first_time = 0.0;
  for (const Pair& p : pairs) {
    if (p.first < 0.0) continue;
    ++n_first;
    first_time += p.first;
    first_by_species[index(p.first_species)] += 1;
    first_time_by_species[index(p.first_species)] += p.first;
    if (p.second >= 0.0) {
      const Species survivor = companion(p.first_species);
      second_by_species[index(survivor)] += 1;
      gap_by_species[index(survivor)] += p.second - p.first;
    }
  }
  if (n_first < std::max<std::int64_t>(min_pairs, 2)) {
    throw InsufficientDataError("rate estimation needs at least " + std::to_string(min_pairs) +
                                " pairs, got " + std::to_string(n_first));
  }

  RateEstimates est;
  const bool entangled = second_by_species[0] + second_by_species[1] > 0;
  if (!entangled) {
    est.gamma_or = detail::rate_mle(first_by_species[0], first_time_by_species[0]);
    est.gamma_pa = detail::rate_mle(first_by_species[1], first_time_by_species[1]);
    return est;
  }
  est.gamma_t = detail::rate_mle(n_first, first_time);
  for (Species h : kAllSpecies) {
    const std::int64_t c = first_by_species[index(h)];
    std::optional<Estimate> split;
    if (c > 0) {
      const double value = est.gamma_t->value * static_cast<double>(c) / static_cast<double>(n_first);
      split = Estimate{value, value / std::sqrt(static_cast<double>(c)), c};
    }
    (h == Species::Or ? est.gamma_t_or : est.gamma_t_pa) = split;
    (h == Species::Or ? est.gamma_or : est.gamma_pa) =
        detail::rate_mle(second_by_species[index(h)], gap_by_species[index(h)]);
  }
  return est;
}

enum class Verdict { Entangled, Product, Inconclusive };

[[nodiscard]] constexpr std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::Entangled: return "Entangled";
    case Verdict::Product: return "Product";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

struct DetectOptions {
  /// Sup-norm threshold; 0 selects 3·1.36/√n0.
  double threshold = 0.0;
  std::int64_t min_pairs = kDefaultMinPairs;
};

[[nodiscard]] inline double default_threshold(std::int64_t n0) {
  return 3.0 * 1.36 / std::sqrt(static_cast<double>(n0));
}

struct DetectionVerdict {
  Verdict verdict = Verdict::Inconclusive;
  /// max over observed species of sup_t |N_h(t)/n0 − (1 − e^{−Γ_h t})|.
  double statistic = 0.0;
  double threshold = 0.0;
  /// Per-species statistic; empty for species without photons.
  std::array<std::optional<double>, 2> species_statistic;
  /// Product-model rate fitted to each species' arrival times.
  std::array<std::optional<Estimate>, 2> fitted_rates;
};

namespace detail {

[[nodiscard]] inline Verdict decide(double statistic, double threshold, bool enough) {
  if (!enough) return Verdict::Inconclusive;
  if (statistic > 1.2 * threshold) return Verdict::Entangled;
  if (statistic < 0.8 * threshold) return Verdict::Product;
  return Verdict::Inconclusive;
}

}  // namespace detail

/// Tests species-resolved photon arrival times against the product-state
/// curve 1 − e^{−Γ_h t} of the reference rates. Uses neither pair identity
/// nor order, so it also works on cloud data. The supremum is exact over the
/// empirical step function, including its t → ∞ limit.
[[nodiscard]] inline DetectionVerdict detect(std::span<const PhotonEvent> events, std::int64_t n0,
                                             const RateSet& reference, DetectOptions options = {}) {
  if (n0 < 1) throw DomainError("n0 must be at least 1");
  DetectionVerdict result;
  result.threshold = options.threshold > 0.0 ? options.threshold : default_threshold(n0);

  std::array<std::vector<double>, 2> times;
  for (const PhotonEvent& e : events) {
    if (!(e.time >= 0.0) || std::isinf(e.time)) throw DataError("event time must be finite and non-negative");
    times[index(e.species)].push_back(e.time);
  }
  const double inv_n0 = 1.0 / static_cast<double>(n0);
  for (Species h : kAllSpecies) {
    std::vector<double>& ts = times[index(h)];
    if (ts.empty()) continue;
    std::sort(ts.begin(), ts.end());
    const double gamma = reference.gamma(h);
    double sup = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const double model = -std::expm1(-gamma * ts[i]);
      const double before = static_cast<double>(i) * inv_n0;
      const double after = static_cast<double>(i + 1) * inv_n0;
      sup = std::max({sup, std::abs(before - model), std::abs(after - model)});
      total += ts[i];
    }
    sup = std::max(sup, std::abs(static_cast<double>(ts.size()) * inv_n0 - 1.0));
    result.species_statistic[index(h)] = sup;
    result.statistic = std::max(result.statistic, sup);
    result.fitted_rates[index(h)] = detail::rate_mle(static_cast<std::int64_t>(ts.size()), total);
  }
  result.verdict = detail::decide(result.statistic, result.threshold, n0 >= options.min_pairs);
  return result;
}

/// Same test on cumulative photon counts given on a grid (for instance an
/// analytic curve, i.e. the infinite-sample limit). Species whose count
/// stays zero are skipped.
template <class T>
[[nodiscard]] DetectionVerdict detect(const BasicPopulationCurve<T>& curve,
                                      const RateSet& reference, DetectOptions options = {}) {
  const double n0 = static_cast<double>(curve.n0);
  if (!(n0 > 0.0)) throw DomainError("n0 must be positive");
  DetectionVerdict result;
  result.threshold = options.threshold > 0.0
                         ? options.threshold
                         : 3.0 * 1.36 / std::sqrt(n0);
  for (Species h : kAllSpecies) {
    const auto& photons = curve.photons(h);
    if (photons.empty() || photons.back() == T{}) continue;
    double sup = 0.0;
    for (std::size_t i = 0; i < curve.size(); ++i) {
      const double model = -std::expm1(-reference.gamma(h) * curve.grid[i]);
      sup = std::max(sup, std::abs(static_cast<double>(photons[i]) / n0 - model));
    }
    result.species_statistic[index(h)] = sup;
    result.statistic = std::max(result.statistic, sup);
  }
  result.verdict = detail::decide(result.statistic, result.threshold,
                                  n0 >= static_cast<double>(options.min_pairs));
  return result;
}

}  // namespace decaylab
