#pragma once

// Test-only reference computations. Nothing here calls the closed forms in
// decaylab/kinetics.hpp; they integrate or scan the defining equations.

#include <array>
#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "decaylab/rates.hpp"

namespace decaylab::oracle {

/// State (n, n_or, n_pa, N_or, N_pa) of the rate equations
///   dn/dt = −Γ̃ n,   dn_h/dt = Γ̃_H n − Γ_h n_h,   dN_h/dt = Γ̃_h n + Γ_h n_h.
using State = std::array<double, 5>;

struct RateParams {
  double gamma_or, gamma_pa, gt_or, gt_pa;
};

inline State derivative(const State& y, const RateParams& p) {
  const double gt = p.gt_or + p.gt_pa;
  return {-gt * y[0],
          p.gt_pa * y[0] - p.gamma_or * y[1],
          p.gt_or * y[0] - p.gamma_pa * y[2],
          p.gt_or * y[0] + p.gamma_or * y[1],
          p.gt_pa * y[0] + p.gamma_pa * y[2]};
}

/// Classical RK4 with fixed step `h`; samples the state every
/// `steps_per_sample` steps, `samples` times (first sample at t = 0).
inline std::vector<State> integrate_rk4(const RateParams& p, double n0, double h,
                                        std::size_t steps_per_sample, std::size_t samples) {
  std::vector<State> out;
  out.reserve(samples);
  State y{n0, 0.0, 0.0, 0.0, 0.0};
  out.push_back(y);
  const auto axpy = [](const State& a, double s, const State& b) {
    State r;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = a[i] + s * b[i];
    return r;
  };
  for (std::size_t k = 1; k < samples; ++k) {
    for (std::size_t s = 0; s < steps_per_sample; ++s) {
      const State k1 = derivative(y, p);
      const State k2 = derivative(axpy(y, 0.5 * h, k1), p);
      const State k3 = derivative(axpy(y, 0.5 * h, k2), p);
      const State k4 = derivative(axpy(y, h, k3), p);
      for (std::size_t i = 0; i < y.size(); ++i) {
        y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      }
    }
    out.push_back(y);
  }
  return out;
}

/// Left-hand side of the species lifetime equation as printed:
/// (1 − A) e^{−Γ̃τ} + A e^{−Γ_h τ}, A = Γ̃_H/(Γ̃ − Γ_h). Non-degenerate rates only.
inline double lifetime_lhs(double tau, double gamma_h, double gt, double gt_companion) {
  const double a = gt_companion / (gt - gamma_h);
  return (1.0 - a) * std::exp(-gt * tau) + a * std::exp(-gamma_h * tau);
}

/// First point of the 1e-6 grid where the left-hand side drops to e^{−1}.
/// A 1e-3 scan locates the cell, then the 1e-6 scan runs inside it; the LHS
/// is monotone so this is the same point a full 1e-6 scan would find.
inline double lifetime_grid_scan(double gamma_h, double gt, double gt_companion) {
  const double target = std::exp(-1.0);
  const double coarse = 1e-3;
  const double fine = 1e-6;
  long c = 0;
  while (lifetime_lhs(static_cast<double>(c) * coarse, gamma_h, gt, gt_companion) > target) ++c;
  const long start = (c - 1) * 1000;
  for (long f = start;; ++f) {
    const double t = static_cast<double>(f) * fine;
    if (lifetime_lhs(t, gamma_h, gt, gt_companion) <= target) return t;
  }
}

/// Binomial standard deviation of a fraction p estimated from n samples.
inline double binomial_sigma(double p, double n) {
  return std::sqrt(std::max(0.0, p * (1.0 - p)) / n);
}

/// Random complex W with |W| ≤ radius.
inline Complex random_w(std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> r(0.0, radius);
  std::uniform_real_distribution<double> phi(0.0, 2.0 * 3.14159265358979323846);
  return std::polar(r(rng), phi(rng));
}

}  // namespace decaylab::oracle
