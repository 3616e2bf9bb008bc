#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "epilv/params.hpp"

namespace epilv {

// Canonical state ordering: (S_h, I_h, S_v, I_v, D).
using State5 = Eigen::Matrix<double, 5, 1>;
// Full dimensional state: (S_h, I_h, R_h, S_v, I_v, D).
using State6 = Eigen::Matrix<double, 6, 1>;
// Lotka-Volterra aggregate: (N_v, D).
using State2 = Eigen::Matrix<double, 2, 1>;

namespace detail {
template <class Vec>
void require_finite(const Vec& y, const char* what) {
  if (!y.allFinite()) throw std::domain_error(std::string(what) + ": non-finite state");
}
} // namespace detail

/// Full dimensional model, six compartments.
inline State6 rhs_full(const State6& y, const DimensionalParams& p) {
  detail::require_finite(y, "rhs_full");
  const double S_h = y[0], I_h = y[1], R_h = y[2], S_v = y[3], I_v = y[4], D = y[5];
  const double foi_h = p.b * p.beta_h / p.N_h; // force of infection factors
  const double foi_v = p.b * p.beta_v / p.N_h;
  State6 dy;
  dy[0] = p.mu_h * p.N_h - foi_h * S_h * I_v - p.mu_h * S_h;
  dy[1] = foi_h * S_h * I_v - (p.gamma + p.mu_h) * I_h;
  dy[2] = p.gamma * I_h - p.mu_h * R_h;
  dy[3] = p.mu_v * (S_v + I_v) - (foi_v * I_h + p.alpha * D) * S_v;
  dy[4] = foi_v * S_v * I_h - p.alpha * D * I_v;
  dy[5] = p.eta * (S_v + I_v) * D - p.mu_D * D;
  return dy;
}

/// Rescaled five-compartment model.
inline State5 rhs_dimensionless(const State5& y, const DimensionlessParams& p) {
  detail::require_finite(y, "rhs_dimensionless");
  const double S_h = y[0], I_h = y[1], S_v = y[2], I_v = y[3], D = y[4];
  State5 dy;
  dy[0] = p.mu_h * (1.0 - S_h) - p.B_h * S_h * I_v;
  dy[1] = p.B_h * S_h * I_v - (p.gamma + p.mu_h) * I_h;
  dy[2] = (S_v + I_v) - p.B_v * S_v * I_h - D * S_v;
  dy[3] = p.B_v * S_v * I_h - D * I_v;
  dy[4] = (S_v + I_v - 1.0) * p.mu_D * D;
  return dy;
}

/// Rescaled model with an external predator source u added to the D equation.
inline State5 rhs_controlled(const State5& y, const DimensionlessParams& p, double u) {
  if (!(u >= 0.0)) throw std::domain_error("rhs_controlled: control must be nonnegative");
  State5 dy = rhs_dimensionless(y, p);
  dy[4] += u;
  return dy;
}

/// Vector-predator aggregate subsystem.
inline State2 rhs_lv(const State2& y, const DimensionlessParams& p) {
  detail::require_finite(y, "rhs_lv");
  State2 dy;
  dy[0] = y[0] * (1.0 - y[1]);
  dy[1] = p.mu_D * y[1] * (y[0] - 1.0);
  return dy;
}

/// Lyapunov-type functional of the aggregate subsystem; always <= -2 with
/// equality only at the coexistence point (1, 1).
inline double v_lv(double N_v, double D) {
  if (!(N_v > 0.0) || !(D > 0.0)) throw std::domain_error("v_lv: arguments must be positive");
  return std::log(N_v) - N_v + std::log(D) - D;
}

} // namespace epilv
