#include "epilv/control.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace epilv::control {

void CostWeights::validate() const {
  if (c < 0 || q < 0 || r < 0 || a < 0)
    throw std::invalid_argument("CostWeights: weights must be nonnegative");
  if (c == 0.0 && q == 0.0)
    throw std::invalid_argument("CostWeights: c and q cannot both be zero");
  if (!(u_max > 0.0)) throw std::invalid_argument("CostWeights: u_max must be positive");
  if (!(T > 0.0)) throw std::invalid_argument("CostWeights: T must be positive");
}

void SweepOptions::validate() const {
  if (!(relaxation >= 0.0 && relaxation < 1.0))
    throw std::invalid_argument("SweepOptions: relaxation must be in [0, 1)");
  if (grid_size < 2 || grid_size % 2 != 0)
    throw std::invalid_argument("SweepOptions: grid_size must be even and >= 2");
  if (!(tol_abs >= 0.0) || !(tol_rel >= 0.0) || tol_abs + tol_rel == 0.0)
    throw std::invalid_argument("SweepOptions: tolerances must be nonnegative, not both zero");
  if (max_iterations < 1) throw std::invalid_argument("SweepOptions: max_iterations >= 1");
  if (u0 < 0.0) throw std::invalid_argument("SweepOptions: u0 must be nonnegative");
}

ControlSignal::ControlSignal(double horizon, Eigen::VectorXd values)
    : horizon_(horizon), values_(std::move(values)) {
  if (!(horizon_ > 0.0)) throw std::invalid_argument("ControlSignal: horizon must be positive");
  if (values_.size() < 2) throw std::invalid_argument("ControlSignal: need at least 2 nodes");
  if ((values_.array() < 0.0).any())
    throw std::invalid_argument("ControlSignal: values must be nonnegative");
}

ControlSignal ControlSignal::constant(double horizon, int intervals, double value) {
  return ControlSignal(horizon, Eigen::VectorXd::Constant(intervals + 1, value));
}

double ControlSignal::node_time(int i) const {
  return horizon_ * (static_cast<double>(i) / static_cast<double>(intervals()));
}

double ControlSignal::value_at(double t) const {
  const int n = intervals();
  const double s = t / horizon_ * n;
  if (s <= 0.0) return values_[0];
  if (s >= n) return values_[n];
  const int i = static_cast<int>(s);
  const double w = s - i;
  return values_[i] * (1.0 - w) + values_[i + 1] * w;
}

double hamiltonian(const State5& state, double u, const Adjoint5& p,
                   const DimensionlessParams& params, const CostWeights& w) {
  const State5 f = rhs_controlled(state, params, u);
  return p.dot(f) - (w.c * u * u + w.q * u + w.r * state[1]);
}

Adjoint5 adjoint_rhs(const Adjoint5& p, const State5& state, const DimensionlessParams& params,
                     const CostWeights& w) {
  detail::require_finite(state, "adjoint_rhs");
  detail::require_finite(p, "adjoint_rhs");
  const double S_h = state[0], I_h = state[1], S_v = state[2], I_v = state[3], D = state[4];
  const double p1 = p[0], p2 = p[1], p3 = p[2], p4 = p[3], p5 = p[4];
  Adjoint5 dp;
  dp[0] = (p1 - p2) * params.B_h * I_v + p1 * params.mu_h;
  dp[1] = p2 * (params.gamma + params.mu_h) + (p3 - p4) * params.B_v * S_v + w.r;
  dp[2] = p3 * (-1.0 + D) + (p3 - p4) * params.B_v * I_h - p5 * params.mu_D * D;
  dp[3] = (p1 - p2) * params.B_h * S_h - p3 + p4 * D - p5 * params.mu_D * D;
  dp[4] = p3 * S_v + p4 * I_v - p5 * params.mu_D * (S_v + I_v) + p5 * params.mu_D;
  return dp;
}

double optimal_u(double p5, const CostWeights& w, double tie_value, double tie_eps) {
  if (w.c > 0.0) {
    return std::clamp((p5 - w.q) / (2.0 * w.c), 0.0, w.u_max);
  }
  if (std::abs(p5 - w.q) <= tie_eps) return tie_value;
  return p5 > w.q ? w.u_max : 0.0;
}

double objective(const Trajectory& state, const ControlSignal& u, const CostWeights& w) {
  const int n = u.intervals();
  if (n % 2 != 0) throw std::invalid_argument("objective: control grid must have even intervals");
  const double t0 = state.forward() ? state.start_time() : state.end_time();
  const double t1 = state.forward() ? state.end_time() : state.start_time();
  if (std::abs(t0) > 1e-12 * std::max(1.0, std::abs(t1)) ||
      std::abs(t1 - u.horizon()) > 1e-9 * std::max(1.0, u.horizon()))
    throw std::invalid_argument("objective: trajectory span does not match the control grid");

  const std::vector<double> grid = uniform_grid(0.0, u.horizon(), n);
  double integral = 0.0;
  const double h = u.horizon() / n;
  for (int i = 0; i <= n; ++i) {
    const double ui = u.values()[i];
    const double ih = state.value_at(grid[static_cast<std::size_t>(i)])[1];
    const double g = w.c * ui * ui + w.q * ui + w.r * ih;
    const double weight = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    integral += weight * g;
  }
  integral *= h / 3.0;
  const double sh_T = state.value_at(u.horizon())[0];
  return integral - w.a * sh_T;
}

Trajectory integrate_controlled(const DimensionlessParams& params, const ControlSignal& u,
                                const State5& x0, const SolverOptions& solver) {
  return integrate(
      [&](double t, const Eigen::VectorXd& y) -> Eigen::VectorXd {
        return rhs_controlled(y, params, u.value_at(t));
      },
      x0, 0.0, u.horizon(), solver);
}

Trajectory integrate_adjoint(const DimensionlessParams& params, const CostWeights& w,
                             const Trajectory& state, const SolverOptions& solver) {
  const double T = state.end_time();
  Adjoint5 pT;
  pT << w.a, 0, 0, 0, 0;
  return integrate(
      [&](double t, const Eigen::VectorXd& p) -> Eigen::VectorXd {
        return adjoint_rhs(p, state.value_at(t), params, w);
      },
      pT, T, 0.0, solver);
}

SweepResult sweep_solve(const DimensionlessParams& params, const CostWeights& w,
                        const State5& x0, const SweepOptions& opts) {
  params.validate();
  w.validate();
  opts.validate();
  if ((x0.array() < 0.0).any())
    throw std::invalid_argument("sweep_solve: initial state must be nonnegative");

  const int n = opts.grid_size;
  ControlSignal u = ControlSignal::constant(w.T, n, std::min(opts.u0, w.u_max));

  struct Iterate {
    ControlSignal control;
    Trajectory state;
    Trajectory adjoint;
    double objective;
  };
  std::optional<Iterate> best;
  std::vector<double> history;

  auto run_iteration = [&](const ControlSignal& uk, int iter) -> Iterate {
    try {
      Trajectory state = integrate_controlled(params, uk, x0, opts.solver);
      const double j = objective(state, uk, w);
      Trajectory adj = integrate_adjoint(params, w, state, opts.solver);
      return {uk, std::move(state), std::move(adj), j};
    } catch (const IntegrationError& e) {
      throw SweepError(std::string("sweep_solve: ") + e.what() + " (iteration " +
                           std::to_string(iter) + ")",
                       iter);
    }
  };

  auto finalize = [&](Iterate it, int iterations, bool converged, double change) {
    // Residual against the pointwise optimality law.
    double res = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double p5 = it.adjoint.value_at(it.control.node_time(i))[4];
      const double ui = it.control.values()[i];
      res = std::max(res, std::abs(ui - optimal_u(p5, w, ui)));
    }
    SweepResult out{std::move(it.control), std::move(it.state), std::move(it.adjoint),
                    history,  iterations,  converged,
                    change,   res,         it.objective,
                    best ? best->objective : it.objective};
    return out;
  };

  double change = 0.0;
  for (int k = 0; k < opts.max_iterations; ++k) {
    Iterate it = run_iteration(u, k);
    history.push_back(it.objective);
    if (!best || it.objective < best->objective) best = it;

    Eigen::VectorXd ustar(n + 1);
    for (int i = 0; i <= n; ++i) {
      const double p5 = it.adjoint.value_at(u.node_time(i))[4];
      ustar[i] = optimal_u(p5, w, u.values()[i]);
    }
    const Eigen::VectorXd unew =
        opts.relaxation * u.values() + (1.0 - opts.relaxation) * ustar;
    change = (unew - u.values()).cwiseAbs().maxCoeff();
    const double tol = opts.tol_abs + opts.tol_rel * unew.cwiseAbs().maxCoeff();
    u = ControlSignal(w.T, unew);

    if (change <= tol) {
      Iterate fin = run_iteration(u, k + 1);
      history.push_back(fin.objective);
      if (!best || fin.objective < best->objective) best = fin;
      // The converged iterate is returned, not the best-objective one: near a
      // bang-bang solution intermediate relaxed iterates can undercut the
      // fixed point on the discrete grid while violating the switching law.
      return finalize(std::move(fin), k + 2, true, change);
    }
  }
  return finalize(std::move(*best), opts.max_iterations, false, change);
}

GradientCheckReport gradient_check(const ControlSignal& u, const DimensionlessParams& params,
                                   const CostWeights& w, const State5& x0, const BumpSpec& bump,
                                   const SolverOptions& solver) {
  if (!(bump.t1 >= 0.0 && bump.t2 > bump.t1 && bump.t2 <= u.horizon()))
    throw std::invalid_argument("gradient_check: bump interval must lie in [0, T]");
  const int n = u.intervals();

  std::vector<int> nodes;
  for (int i = 0; i <= n; ++i) {
    const double t = u.node_time(i);
    if (t >= bump.t1 && t <= bump.t2) nodes.push_back(i);
  }
  if (nodes.empty()) throw std::invalid_argument("gradient_check: bump covers no grid node");
  for (int i : nodes) {
    const double ui = u.values()[i];
    if (ui - bump.eps < 0.0 || ui + bump.eps > w.u_max)
      throw std::invalid_argument("gradient_check: bump leaves the admissible box");
  }

  auto j_max = [&](const ControlSignal& uc) {
    const Trajectory state = integrate_controlled(params, uc, x0, solver);
    return -objective(state, uc, w); // maximization form
  };

  ControlSignal up = u, um = u;
  for (int i : nodes) {
    up.values()[i] += bump.eps;
    um.values()[i] -= bump.eps;
  }
  const double fd = (j_max(up) - j_max(um)) / (2.0 * bump.eps);

  const Trajectory state = integrate_controlled(params, u, x0, solver);
  const Trajectory adj = integrate_adjoint(params, w, state, solver);
  // The finite difference differentiates the discrete objective, so the
  // adjoint expression must use the matching discrete weights: each node's
  // hat function integrates p5 with weight h, while the explicit control
  // cost carries that node's composite-Simpson weight.
  const double h = u.horizon() / n;
  double integral = 0.0;
  for (int i : nodes) {
    const double t = u.node_time(i);
    const double hat_w = (i == 0 || i == n) ? 0.5 * h : h;
    const double simpson_w = (i == 0 || i == n) ? h / 3.0 : (i % 2 == 1 ? 4.0 : 2.0) * h / 3.0;
    integral += hat_w * adj.value_at(t)[4] - simpson_w * (2.0 * w.c * u.values()[i] + w.q);
  }

  GradientCheckReport rep;
  rep.fd_derivative = fd;
  rep.adjoint_integral = integral;
  const double scale = std::max({std::abs(fd), std::abs(integral), 1e-300});
  rep.relative_discrepancy = std::abs(fd - integral) / scale;
  return rep;
}

} // namespace epilv::control
