#pragma once

#include <cmath>
#include <complex>
#include <string>

#include "decaylab/errors.hpp"
#include "decaylab/species.hpp"

namespace decaylab {

using Complex = std::complex<double>;

namespace detail {

inline void require_rate(double gamma, const char* what) {
  if (!std::isfinite(gamma) || !(gamma > 0.0)) {
    throw DomainError(std::string(what) + " must be positive and finite");
  }
}

inline void require_finite(Complex w, const char* what) {
  if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) {
    throw DomainError(std::string(what) + " must be finite");
  }
}

}  // namespace detail

/// Free-atom decay rates and the W expectation values of the non-trivial
/// part of each species' evolution operator. W is a time-independent
/// constant (stationary instantaneous rates).
class RateSet {
 public:
  RateSet(double gamma_or, double gamma_pa, Complex w_or = {}, Complex w_pa = {})
      : gamma_or_(gamma_or), gamma_pa_(gamma_pa), w_or_(w_or), w_pa_(w_pa) {
    detail::require_rate(gamma_or, "gamma_or");
    detail::require_rate(gamma_pa, "gamma_pa");
    detail::require_finite(w_or, "w_or");
    detail::require_finite(w_pa, "w_pa");
  }

  [[nodiscard]] double gamma_or() const noexcept { return gamma_or_; }
  [[nodiscard]] double gamma_pa() const noexcept { return gamma_pa_; }
  [[nodiscard]] Complex w_or() const noexcept { return w_or_; }
  [[nodiscard]] Complex w_pa() const noexcept { return w_pa_; }

  [[nodiscard]] double gamma(Species h) const noexcept {
    return h == Species::Or ? gamma_or_ : gamma_pa_;
  }
  [[nodiscard]] Complex w(Species h) const noexcept {
    return h == Species::Or ? w_or_ : w_pa_;
  }

  friend bool operator==(const RateSet&, const RateSet&) = default;

 private:
  double gamma_or_;
  double gamma_pa_;
  Complex w_or_;
  Complex w_pa_;
};

/// Emission rates of the entangled pair. `gamma_t_h` is the rate of
/// species-h photons out of the entangled state; per side it is half that.
struct EntangledRates {
  double gamma_t_or = 0.0;
  double gamma_t_pa = 0.0;
  double gamma_t = 0.0;
  double lambda = 0.0;

  [[nodiscard]] double species(Species h) const noexcept {
    return h == Species::Or ? gamma_t_or : gamma_t_pa;
  }
  [[nodiscard]] double per_side(Species h) const noexcept { return 0.5 * species(h); }

  friend bool operator==(const EntangledRates&, const EntangledRates&) = default;
};

/// Γ_h·|1 + W^H|², with H the companion of h.
[[nodiscard]] inline double entangled_rate(double gamma_h, Complex w_companion) {
  detail::require_rate(gamma_h, "gamma_h");
  detail::require_finite(w_companion, "w");
  return gamma_h * std::norm(1.0 + w_companion);
}

/// (Γ̃_h − Γ_h)/Γ_h = |W|² + 2 Re W. Bounded below by −1.
[[nodiscard]] inline double relative_modification(Complex w_companion) {
  detail::require_finite(w_companion, "w");
  return std::norm(w_companion) + 2.0 * w_companion.real();
}

[[nodiscard]] inline EntangledRates derive_rates(const RateSet& rates) {
  EntangledRates er;
  er.gamma_t_or = entangled_rate(rates.gamma_or(), rates.w_pa());
  er.gamma_t_pa = entangled_rate(rates.gamma_pa(), rates.w_or());
  er.gamma_t = er.gamma_t_or + er.gamma_t_pa;
  er.lambda = er.gamma_t - rates.gamma_or() - rates.gamma_pa();
  return er;
}

/// The unweighted |W^or|² + |W^pa|² + 2Re(W^or + W^pa). Dimensionless; it
/// equals Λ/Γ only when Γ_or = Γ_pa = Γ. Kept for
/// comparison, never used by derive_rates.
[[nodiscard]] inline double lambda_paper_literal(const RateSet& rates) {
  const Complex wo = rates.w_or();
  const Complex wp = rates.w_pa();
  return std::norm(wo) + std::norm(wp) + 2.0 * (wo + wp).real();
}

}  // namespace decaylab
