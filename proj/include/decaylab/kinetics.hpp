#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "decaylab/errors.hpp"
#include "decaylab/population.hpp"
#include "decaylab/rates.hpp"
#include "decaylab/scenario.hpp"

namespace decaylab {

/// Relative width |Γ̃ − Γ_h|/Γ̃ below which the two-exponential closed forms
/// switch to their coincident-rate limit.
inline constexpr double kDegenerateEps = 1e-8;

namespace detail {

inline void require_time(double t) {
  if (std::isnan(t) || t < 0.0) throw DomainError("time must be non-negative");
}

inline void require_count(double n0) {
  if (!std::isfinite(n0) || !(n0 > 0.0)) throw DomainError("n0 must be positive");
}

/// (e^{−a t} − e^{−b t})/(b − a) for a ≠ b, evaluated with the slower
/// exponential factored out so neither term overflows.
[[nodiscard]] inline double decay_kernel(double a, double b, double t) {
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  const double gap = hi - lo;
  return std::exp(-lo * t) * (-std::expm1(-gap * t)) / gap;
}

/// Coincident-rate limit t·e^{−Γt}, taken at the mean rate.
[[nodiscard]] inline double decay_kernel_limit(double a, double b, double t) {
  return t * std::exp(-0.5 * (a + b) * t);
}

[[nodiscard]] inline bool degenerate(double gamma_h, double gamma_t) {
  return std::abs(gamma_t - gamma_h) < kDegenerateEps * gamma_t;
}

/// n_h(t)/n0.
[[nodiscard]] inline double single_fraction(double t, double gamma_h, double gamma_t,
                                            double gamma_t_companion) {
  if (gamma_t_companion == 0.0 || t == 0.0 || std::isinf(t)) return 0.0;
  const double kernel = degenerate(gamma_h, gamma_t) ? decay_kernel_limit(gamma_h, gamma_t, t)
                                                     : decay_kernel(gamma_h, gamma_t, t);
  return gamma_t_companion * kernel;
}

/// (n(t) + n_h(t))/n0: survival of species h starting from the entangled state.
[[nodiscard]] inline double species_survival(double t, Species h, const RateSet& rates,
                                             const EntangledRates& er) {
  return std::exp(-er.gamma_t * t) +
         single_fraction(t, rates.gamma(h), er.gamma_t, er.species(companion(h)));
}

}  // namespace detail

/// Entangled pairs remaining: n0·e^{−Γ̃t}.
[[nodiscard]] inline double n_entangled(double t, double n0, const EntangledRates& er) {
  detail::require_time(t);
  detail::require_count(n0);
  return n0 * std::exp(-er.gamma_t * t);
}

/// Lone unstable atoms of species h left behind by disentangling emissions of
/// the companion species: n0·Γ̃_H/(Γ̃ − Γ_h)·(e^{−Γ_h t} − e^{−Γ̃t}).
[[nodiscard]] inline double n_single(double t, Species h, double n0, const RateSet& rates,
                                     const EntangledRates& er) {
  detail::require_time(t);
  detail::require_count(n0);
  return n0 * detail::single_fraction(t, rates.gamma(h), er.gamma_t, er.species(companion(h)));
}

/// Cumulative species-h photons N_h(t). Every pair that has disentangled owes
/// exactly one h photon, and it is still owed only while a lone h atom
/// survives, so N_h = n0(1 − e^{−Γ̃t}) − n_h. This is the integral of
/// dN_h/dt = Γ̃_h n + Γ_h n_h without the cancellation of the expanded form.
[[nodiscard]] inline double photons_emitted(double t, Species h, double n0, const RateSet& rates,
                                            const EntangledRates& er) {
  detail::require_time(t);
  detail::require_count(n0);
  const double disentangled = -std::expm1(-er.gamma_t * t);
  return n0 * (disentangled -
               detail::single_fraction(t, rates.gamma(h), er.gamma_t, er.species(companion(h))));
}

[[nodiscard]] inline double product_population(double t, Species h, double n0,
                                               const RateSet& rates) {
  detail::require_time(t);
  detail::require_count(n0);
  return n0 * std::exp(-rates.gamma(h) * t);
}

[[nodiscard]] inline double product_photons(double t, Species h, double n0, const RateSet& rates) {
  detail::require_time(t);
  detail::require_count(n0);
  return -n0 * std::expm1(-rates.gamma(h) * t);
}

/// Evaluates every series of the closed-form solution on `grid`.
[[nodiscard]] inline PopulationCurve evaluate_curve(std::span<const double> grid, double n0,
                                                    const RateSet& rates, Mode mode) {
  validate_grid(grid);
  detail::require_count(n0);
  PopulationCurve curve({grid.begin(), grid.end()}, n0, mode);
  if (!mode.entangled) {
    const Species h = mode.product_species;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      curve.n[i] = product_population(grid[i], h, n0, rates);
      curve.photons(h)[i] = product_photons(grid[i], h, n0, rates);
    }
    return curve;
  }
  const EntangledRates er = derive_rates(rates);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid[i];
    curve.n[i] = n_entangled(t, n0, er);
    for (Species h : kAllSpecies) {
      curve.single(h)[i] = n_single(t, h, n0, rates, er);
      curve.photons(h)[i] = photons_emitted(t, h, n0, rates, er);
    }
  }
  return curve;
}

[[nodiscard]] inline PopulationCurve evaluate_curve(const Scenario& scenario) {
  scenario.validate();
  const std::vector<double> grid = scenario.grid();
  return evaluate_curve(grid, static_cast<double>(scenario.n0), scenario.rates, scenario.mode);
}

/// Root of a lifetime equation plus |S(τ)/n0 − e^{−1}| at the returned τ.
struct LifetimeSolution {
  double tau = 0.0;
  double residual = 0.0;
};

/// Species-h lifetime τ̃_h for an initially entangled ensemble: the time at
/// which n + n_h falls to n0/e. The survival is strictly decreasing from 1 to
/// 0, so the root is unique; it is bracketed on [0, B] with B doubled from
/// the shorter time scale, then bisected. `tol` is relative to the longer
/// time scale max(1/Γ_h, 1/Γ̃) and also bounds the residual.
[[nodiscard]] inline LifetimeSolution solve_lifetime_species(Species h, const RateSet& rates,
                                                             const EntangledRates& er,
                                                             double tol = 1e-12) {
  const double gamma_h = rates.gamma(h);
  if (!(er.gamma_t > 0.0)) throw DomainError("entangled decay rate must be positive");
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");

  const double target = std::exp(-1.0);
  const auto excess = [&](double tau) {
    return detail::species_survival(tau, h, rates, er) - target;
  };

  const double slow = std::max(1.0 / gamma_h, 1.0 / er.gamma_t);
  const double limit = 1e3 * slow;
  double lo = 0.0;
  double hi = std::min(1.0 / gamma_h, 1.0 / er.gamma_t);
  while (excess(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > limit) {
      throw SolverError("could not bracket the species lifetime within 1e3 time scales");
    }
  }

  const double width_tol = tol * slow;
  double f_mid = excess(hi);
  double mid = hi;
  for (int iter = 0; iter < 4096; ++iter) {
    mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    f_mid = excess(mid);
    if (f_mid > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= width_tol && std::abs(f_mid) <= tol) break;
  }
  // Report whichever bracket end lies closer to the root.
  const double f_lo = excess(lo);
  const double f_hi = excess(hi);
  if (std::abs(f_lo) < std::abs(f_hi)) return {lo, std::abs(f_lo)};
  return {hi, std::abs(f_hi)};
}

[[nodiscard]] inline double lifetime_species(Species h, const RateSet& rates,
                                             const EntangledRates& er, double tol = 1e-12) {
  return solve_lifetime_species(h, rates, er, tol).tau;
}

struct LifetimeReport {
  double tau_or = 0.0;
  double tau_pa = 0.0;
  double tau_tilde_state = 0.0;
  double tau_tilde_or = 0.0;
  double tau_tilde_pa = 0.0;
  double solver_residual = 0.0;

  [[nodiscard]] double tau(Species h) const noexcept { return h == Species::Or ? tau_or : tau_pa; }
  [[nodiscard]] double tau_tilde(Species h) const noexcept {
    return h == Species::Or ? tau_tilde_or : tau_tilde_pa;
  }
};

[[nodiscard]] inline LifetimeReport lifetime_report(const RateSet& rates, double tol = 1e-12) {
  const EntangledRates er = derive_rates(rates);
  if (!(er.gamma_t > 0.0)) throw NoDecayError("entangled state never decays (Γ̃ = 0)");
  LifetimeReport report;
  report.tau_or = 1.0 / rates.gamma_or();
  report.tau_pa = 1.0 / rates.gamma_pa();
  report.tau_tilde_state = 1.0 / er.gamma_t;
  const LifetimeSolution lo = solve_lifetime_species(Species::Or, rates, er, tol);
  const LifetimeSolution lp = solve_lifetime_species(Species::Pa, rates, er, tol);
  report.tau_tilde_or = lo.tau;
  report.tau_tilde_pa = lp.tau;
  report.solver_residual = std::max(lo.residual, lp.residual);
  return report;
}

}  // namespace decaylab
