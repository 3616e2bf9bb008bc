#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace epilv {

/// Parameters of the dimensional host-vector-predator model. Rates are per
/// day, populations in individuals.
struct DimensionalParams {
  double mu_h;    // host birth/death rate
  double mu_v;    // vector birth rate
  double mu_D;    // predator death rate
  double gamma;   // host recovery rate
  double alpha;   // predation rate per predator
  double eta;     // prey-to-predator conversion efficiency
  double b;       // bite rate
  double beta_h;  // host transmission probability per bite
  double beta_v;  // vector transmission probability per bite
  double N_h;     // total host population

  void validate() const;
};

/// Parameters of the rescaled model (time measured in vector generations).
struct DimensionlessParams {
  double B_h;   // host transmission
  double B_v;   // vector transmission
  double mu_h;  // host turnover
  double gamma; // recovery
  double mu_D;  // predator mortality

  void validate() const;
};

/// Conversion factors between the dimensional and dimensionless systems.
/// tau = mu_v * t, s_h = S_h/N_h, s_v = S_v/N_v_star, d = D/D_star.
/// The bite rate is kept so the parameter map is invertible.
struct Scales {
  double mu_v;
  double N_h;
  double N_v_star;  // mu_D / eta
  double D_star;    // mu_v / alpha
  double bite_rate; // b, carried through for the inverse map

  double time_to_tau(double t) const { return mu_v * t; }
  double tau_to_time(double tau) const { return tau / mu_v; }

  // u enters the predator equation additively; the dimensionless control is
  // u_hat = u * alpha / mu_v^2 = u / (D_star * mu_v).
  double control_to_dimensionless(double u) const { return u / (D_star * mu_v); }
  double control_to_dimensional(double u_hat) const { return u_hat * D_star * mu_v; }
};

namespace detail {
inline void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(name) + " must be strictly positive and finite");
  }
}
} // namespace detail

inline void DimensionalParams::validate() const {
  detail::require_positive(mu_h, "mu_h");
  detail::require_positive(mu_v, "mu_v");
  detail::require_positive(mu_D, "mu_D");
  detail::require_positive(gamma, "gamma");
  detail::require_positive(alpha, "alpha");
  detail::require_positive(eta, "eta");
  detail::require_positive(b, "b");
  detail::require_positive(beta_h, "beta_h");
  detail::require_positive(beta_v, "beta_v");
  detail::require_positive(N_h, "N_h");
}

inline void DimensionlessParams::validate() const {
  detail::require_positive(B_h, "B_h");
  detail::require_positive(B_v, "B_v");
  detail::require_positive(mu_h, "mu_h");
  detail::require_positive(gamma, "gamma");
  detail::require_positive(mu_D, "mu_D");
}

struct NondimensionalizeResult {
  DimensionlessParams params;
  Scales scales;
};

inline NondimensionalizeResult nondimensionalize(const DimensionalParams& p) {
  p.validate();
  NondimensionalizeResult r;
  r.params.B_h = p.b * p.beta_h * p.mu_D / (p.mu_v * p.N_h * p.eta);
  r.params.B_v = p.b * p.beta_v / p.mu_v;
  r.params.mu_h = p.mu_h / p.mu_v;
  r.params.gamma = p.gamma / p.mu_v;
  r.params.mu_D = p.mu_D / p.mu_v;
  r.scales.mu_v = p.mu_v;
  r.scales.N_h = p.N_h;
  r.scales.N_v_star = p.mu_D / p.eta;
  r.scales.D_star = p.mu_v / p.alpha;
  r.scales.bite_rate = p.b;
  return r;
}

inline DimensionalParams redimensionalize(const DimensionlessParams& q, const Scales& s) {
  q.validate();
  DimensionalParams p;
  p.mu_v = s.mu_v;
  p.N_h = s.N_h;
  p.b = s.bite_rate;
  p.mu_h = q.mu_h * s.mu_v;
  p.gamma = q.gamma * s.mu_v;
  p.mu_D = q.mu_D * s.mu_v;
  p.eta = p.mu_D / s.N_v_star;
  p.alpha = s.mu_v / s.D_star;
  p.beta_h = q.B_h * s.mu_v * s.N_h / (s.bite_rate * s.N_v_star);
  p.beta_v = q.B_v * s.mu_v / s.bite_rate;
  return p;
}

} // namespace epilv
