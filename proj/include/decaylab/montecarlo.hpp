#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <thread>
#include <utility>
#include <vector>

#include "decaylab/errors.hpp"
#include "decaylab/population.hpp"
#include "decaylab/random.hpp"
#include "decaylab/rates.hpp"
#include "decaylab/scenario.hpp"

namespace decaylab {

/// One detected photon. `pair_id` and `order` are empty for cloud data,
/// where the emitting pair cannot be identified.
struct PhotonEvent {
  std::optional<std::uint64_t> pair_id;
  double time = 0.0;
  Species species = Species::Or;
  Side side = Side::L;
  std::optional<Order> order;

  friend bool operator==(const PhotonEvent&, const PhotonEvent&) = default;
};

/// Total order used for every emitted stream: time, then pair, then order.
[[nodiscard]] inline bool stream_less(const PhotonEvent& a, const PhotonEvent& b) noexcept {
  if (a.time != b.time) return a.time < b.time;
  if (a.pair_id != b.pair_id) return a.pair_id < b.pair_id;
  return a.order < b.order;
}

inline void sort_stream(std::vector<PhotonEvent>& events) {
  std::sort(events.begin(), events.end(), stream_less);
}

/// Drops pair identity and first/second tags, as when every pair sits in the
/// same cloud.
[[nodiscard]] inline std::vector<PhotonEvent> anonymize(std::span<const PhotonEvent> events) {
  std::vector<PhotonEvent> out(events.begin(), events.end());
  for (PhotonEvent& e : out) {
    e.pair_id.reset();
    e.order.reset();
  }
  return out;
}

[[nodiscard]] inline double sample_exponential(Substream& rng, double rate) {
  return -std::log(rng.uniform_open()) / rate;
}

/// Samples the two emissions of one entangled pair: disentangling photon at
/// Exp(Γ̃) of species h with probability Γ̃_h/Γ̃ on a uniformly chosen side,
/// then the surviving companion atom on the other side after Exp(Γ_H).
[[nodiscard]] inline std::pair<PhotonEvent, PhotonEvent> sample_pair(std::uint64_t pair_id,
                                                                     const RateSet& rates,
                                                                     const EntangledRates& er,
                                                                     Substream rng) {
  if (!(er.gamma_t > 0.0)) throw NoDecayError("entangled state never decays (Γ̃ = 0)");
  const double t1 = sample_exponential(rng, er.gamma_t);
  const Species first = rng.uniform_open() * er.gamma_t < er.gamma_t_or ? Species::Or : Species::Pa;
  const Side side = rng.uniform_open() < 0.5 ? Side::L : Side::R;
  const Species survivor = companion(first);
  const double t2 = t1 + sample_exponential(rng, rates.gamma(survivor));
  return {PhotonEvent{pair_id, t1, first, side, Order::First},
          PhotonEvent{pair_id, t2, survivor, opposite(side), Order::Second}};
}

/// A lone product-state atom of species h.
[[nodiscard]] inline PhotonEvent sample_single(std::uint64_t atom_id, Species h,
                                               const RateSet& rates, Substream rng) {
  const double t = sample_exponential(rng, rates.gamma(h));
  const Side side = rng.uniform_open() < 0.5 ? Side::L : Side::R;
  return PhotonEvent{atom_id, t, h, side, Order::First};
}

/// Worker count for a request; 0 means one per hardware thread.
[[nodiscard]] inline unsigned resolve_threads(unsigned requested) noexcept {
  if (requested != 0) return requested;
  return std::max(1U, std::thread::hardware_concurrency());
}

/// Integer-valued histogram of pair states on `grid`. An event at exactly a
/// grid time counts as having happened by then.
[[nodiscard]] inline CountCurve histogram(std::span<const PhotonEvent> events,
                                          std::span<const double> grid, std::int64_t n0,
                                          Mode mode) {
  validate_grid(grid);
  if (n0 < 1) throw DomainError("n0 must be at least 1");
  const std::size_t m = grid.size();
  const auto n0u = static_cast<std::uint64_t>(n0);
  CountCurve curve({grid.begin(), grid.end()}, n0, mode);

  // First grid index at or after t; m when t is past the grid.
  const auto bin = [&](double t) {
    return static_cast<std::size_t>(std::lower_bound(grid.begin(), grid.end(), t) - grid.begin());
  };

  struct Slot {
    double first = -1.0;
    double second = -1.0;
    Species first_species = Species::Or;
    Species second_species = Species::Or;
  };
  std::vector<Slot> slots(n0u);
  for (const PhotonEvent& e : events) {
    if (!(e.time >= 0.0) || std::isinf(e.time)) throw DataError("event time must be finite and non-negative");
    if (!e.pair_id || !e.order) throw DataError("histogram needs pair identity on every event");
    if (*e.pair_id >= n0u) throw DataError("pair_id out of range");
    Slot& s = slots[*e.pair_id];
    if (*e.order == Order::First) {
      if (s.first >= 0.0) throw DataError("pair has two first emissions");
      s.first = e.time;
      s.first_species = e.species;
    } else {
      if (!mode.entangled) throw DataError("product-state stream contains a second emission");
      if (s.second >= 0.0) throw DataError("pair has two second emissions");
      s.second = e.time;
      s.second_species = e.species;
    }
  }

  // Difference arrays: index k adds from grid point k onward.
  std::vector<std::int64_t> d_gone(m + 1, 0);
  std::vector<std::int64_t> d_single[2] = {std::vector<std::int64_t>(m + 1, 0),
                                           std::vector<std::int64_t>(m + 1, 0)};
  std::vector<std::int64_t> d_photon[2] = {std::vector<std::int64_t>(m + 1, 0),
                                           std::vector<std::int64_t>(m + 1, 0)};
  for (const Slot& s : slots) {
    if (s.first < 0.0) {
      if (s.second >= 0.0) throw DataError("second emission without a first");
      continue;
    }
    const std::size_t k1 = bin(s.first);
    d_gone[k1] += 1;
    d_photon[index(s.first_species)][k1] += 1;
    if (!mode.entangled) continue;
    const Species survivor = companion(s.first_species);
    if (s.second >= 0.0) {
      if (s.second_species != survivor) throw DataError("second photon must be the companion species");
      if (s.second < s.first) throw DataError("second emission precedes first");
    }
    const std::size_t k2 = s.second >= 0.0 ? bin(s.second) : m;
    d_single[index(survivor)][k1] += 1;
    d_single[index(survivor)][k2] -= 1;
    d_photon[index(survivor)][k2] += 1;
  }

  std::int64_t gone = 0;
  std::int64_t single[2] = {0, 0};
  std::int64_t photon[2] = {0, 0};
  for (std::size_t k = 0; k < m; ++k) {
    gone += d_gone[k];
    curve.n[k] = n0 - gone;
    for (Species h : kAllSpecies) {
      single[index(h)] += d_single[index(h)][k];
      photon[index(h)] += d_photon[index(h)][k];
      curve.single(h)[k] = single[index(h)];
      curve.photons(h)[k] = photon[index(h)];
    }
  }
  return curve;
}

struct SimulationResult {
  std::vector<PhotonEvent> events;  // sorted by stream_less
  CountCurve curve;
};

/// Samples every pair (or lone atom) of the scenario. The stream is a pure
/// function of (scenario, seed); `threads` only changes wall time. Emissions
/// after t_max are kept; t_max only bounds the histogram grid.
[[nodiscard]] inline SimulationResult simulate(const Scenario& scenario, unsigned threads = 0) {
  scenario.validate();
  const auto n0 = static_cast<std::uint64_t>(scenario.n0);
  const RateSet& rates = scenario.rates;
  const Mode mode = scenario.mode;
  const EntangledRates er = derive_rates(rates);
  if (mode.entangled && !(er.gamma_t > 0.0)) {
    throw NoDecayError("entangled state never decays (Γ̃ = 0)");
  }

  const std::size_t per_unit = mode.entangled ? 2 : 1;
  std::vector<PhotonEvent> events(n0 * per_unit);
  const auto fill = [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t id = begin; id < end; ++id) {
      const Substream rng(scenario.seed, id);
      if (mode.entangled) {
        auto [first, second] = sample_pair(id, rates, er, rng);
        events[2 * id] = first;
        events[2 * id + 1] = second;
      } else {
        events[id] = sample_single(id, mode.product_species, rates, rng);
      }
    }
  };

  const unsigned workers =
      scenario.parallel ? static_cast<unsigned>(std::min<std::uint64_t>(resolve_threads(threads), n0)) : 1U;
  if (workers <= 1) {
    fill(0, n0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    const std::uint64_t chunk = (n0 + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::uint64_t begin = std::min(n0, chunk * w);
      const std::uint64_t end = std::min(n0, begin + chunk);
      pool.emplace_back([&fill, begin, end] { fill(begin, end); });
    }
  }

  const std::vector<double> grid = scenario.grid();
  SimulationResult result;
  result.curve = histogram(events, grid, scenario.n0, mode);
  sort_stream(events);
  result.events = std::move(events);
  return result;
}

}  // namespace decaylab
