#include "epilv/analysis.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace epilv::analysis {

double basic_reproduction_number(const DimensionlessParams& p) {
  p.validate();
  return std::sqrt(p.B_h * p.B_v / (p.gamma + p.mu_h));
}

std::pair<State5, State5> disease_free_equilibria() {
  State5 e1, e2;
  e1 << 1, 0, 0, 0, 0;
  e2 << 1, 0, 1, 0, 1;
  return {e1, e2};
}

std::optional<State5> endemic_equilibrium(const DimensionlessParams& p) {
  p.validate();
  const double gm = p.gamma + p.mu_h;
  if (p.B_h * p.B_v < gm) return std::nullopt;
  State5 e;
  e[0] = (p.B_v * p.mu_h + gm) / (p.B_v * (p.B_h + p.mu_h));                 // S_h*
  e[1] = p.mu_h * (p.B_h * p.B_v - gm) / (p.B_v * (p.B_h + p.mu_h) * gm);   // I_h*
  e[2] = (p.B_h + p.mu_h) * gm / (p.B_h * (p.B_v * p.mu_h + gm));           // S_v*
  e[3] = p.mu_h * (p.B_h * p.B_v - gm) / (p.B_h * (p.B_v * p.mu_h + gm));   // I_v*
  e[4] = 1.0;
  return e;
}

Matrix5d jacobian(const State5& state, const DimensionlessParams& p) {
  detail::require_finite(state, "jacobian");
  const double S_h = state[0], I_h = state[1], S_v = state[2], I_v = state[3], D = state[4];
  const double gm = p.gamma + p.mu_h;
  Matrix5d j;
  // Rows and columns ordered (I_h, I_v, S_h, S_v, D).
  j << -gm,            p.B_h * S_h,  p.B_h * I_v,          0,                      0,
       p.B_v * S_v,    -D,           0,                    p.B_v * I_h,            -I_v,
       0,              -p.B_h * S_h, -p.mu_h - p.B_h * I_v, 0,                     0,
       -p.B_v * S_v,   1,            0,                    1 - p.B_v * I_h - D,    -S_v,
       0,              p.mu_D * D,   0,                    p.mu_D * D,             p.mu_D * (S_v + I_v - 1);
  return j;
}

Eigen::Matrix2d infective_block(const DimensionlessParams& p) {
  p.validate();
  Eigen::Matrix2d m;
  m << -(p.gamma + p.mu_h), p.B_h, p.B_v, -1.0;
  return m;
}

double spectral_abscissa(const Eigen::MatrixXd& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, /*computeEigenvectors=*/false);
  double a = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a = std::max(a, es.eigenvalues()[i].real());
  return a;
}

namespace {

// Root of ln(x) - x = target on a bracket where the function is monotone.
double bisect_log_root(double lo, double hi, double target) {
  auto f = [target](double x) { return std::log(x) - x - target; };
  double flo = f(lo);
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm >= 0.0) == (flo >= 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

} // namespace

LevelSetBounds level_set_bounds(double k0, const DimensionlessParams& p) {
  p.validate();
  if (!(k0 <= -2.0)) throw std::domain_error("level_set_bounds: k0 > -2 is not possible");
  LevelSetBounds out;
  out.k0 = k0;
  if (k0 == -2.0) {
    out.a = out.b = 1.0;
  } else {
    const double target = k0 + 1.0; // ln x - x = k0 + 1
    out.a = bisect_log_root(1e-12, 1.0, target);
    double hi = 2.0;
    while (std::log(hi) - hi > target) hi *= 2.0;
    out.b = bisect_log_root(1.0, hi, target);
  }
  out.eco_r0 = p.B_h * p.B_v / (p.gamma + p.mu_h) * out.b / out.a;
  return out;
}

MetzlerReport metzler_comparison(const DimensionlessParams& p, double k0) {
  const LevelSetBounds lb = level_set_bounds(k0, p);
  MetzlerReport rep;
  rep.m << -(p.gamma + p.mu_h), p.B_h, p.B_v * lb.b, -lb.a;
  rep.stable = rep.m.trace() < 0.0 && rep.m.determinant() > 0.0;
  return rep;
}

ComparisonReport comparison_bound_check(const Trajectory& traj, const DimensionlessParams& p,
                                        double k0, int grid_points) {
  if (grid_points < 2) throw std::invalid_argument("comparison_bound_check: need >= 2 points");
  const MetzlerReport mz = metzler_comparison(p, k0);
  const Eigen::Matrix2d m = mz.m;

  const std::vector<double> grid = uniform_grid(traj.start_time(), traj.end_time(), grid_points - 1);
  const auto states = traj.sample(grid);

  Eigen::VectorXd z0(2);
  z0 << states.front()[1], states.front()[3];
  Trajectory ztraj = integrate(
      [&m](double, const Eigen::VectorXd& z) -> Eigen::VectorXd { return m * z; }, z0,
      traj.start_time(), traj.end_time());

  ComparisonReport rep;
  rep.grid = grid;
  constexpr double region_slack = 1e-9;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const State5 y = states[i];
    // Membership in the level region: hosts below carrying fraction and the
    // aggregate (N_v, D) inside the closed orbit of level k0, i.e. v_lv >= k0.
    const double nv = y[2] + y[3];
    const bool inside = y[0] + y[1] <= 1.0 + region_slack && nv > 0.0 && y[4] > 0.0 &&
                        v_lv(nv, y[4]) >= k0 - region_slack;
    if (!inside && rep.in_region) {
      rep.in_region = false;
      rep.first_exit_time = grid[i];
    }
    const Eigen::VectorXd z = ztraj.value_at(grid[i]);
    rep.z1.push_back(z[0]);
    rep.z2.push_back(z[1]);
    rep.max_excess_ih = std::max(rep.max_excess_ih, y[1] - z[0]);
    rep.max_excess_iv = std::max(rep.max_excess_iv, y[3] - z[1]);
  }
  return rep;
}

namespace {

EquilibriumReport make_report(const std::string& label, const State5& state,
                              const DimensionlessParams& p) {
  EquilibriumReport rep;
  rep.label = label;
  rep.state = state;
  rep.jacobian = jacobian(state, p);
  Eigen::EigenSolver<Matrix5d> es(rep.jacobian, /*computeEigenvectors=*/false);
  rep.eigenvalues = es.eigenvalues();
  return rep;
}

std::string classify_spectrum(const Vector5cd& ev) {
  double rho = 0.0;
  for (int i = 0; i < 5; ++i) rho = std::max(rho, std::abs(ev[i]));
  const double tol = 1e-6 * std::max(rho, 1.0);
  int pos = 0, zero = 0;
  for (int i = 0; i < 5; ++i) {
    if (ev[i].real() > tol) ++pos;
    else if (ev[i].real() >= -tol) ++zero;
  }
  if (pos > 0) return "unstable";
  if (zero > 0) return "stable, not asymptotically (zero-real-part pair)";
  return "locally asymptotically stable";
}

} // namespace

std::vector<EquilibriumReport> classify_equilibria(const DimensionlessParams& p) {
  p.validate();
  const double r0 = basic_reproduction_number(p);
  auto [e1, e2] = disease_free_equilibria();

  std::vector<EquilibriumReport> out;
  out.push_back(make_report("E1", e1, p));
  out.back().classification = "unstable (non-hyperbolic)";

  out.push_back(make_report("E2", e2, p));
  if (r0 > 1.0) out.back().classification = "unstable (R0 > 1)";
  else if (r0 < 1.0) out.back().classification = "locally stable infectives decay (R0 < 1)";
  else out.back().classification = "threshold (R0 = 1)";

  if (auto ee = endemic_equilibrium(p)) {
    out.push_back(make_report("Ee", *ee, p));
    out.back().classification = classify_spectrum(out.back().eigenvalues);
  }
  return out;
}

} // namespace epilv::analysis
