#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "epilv/integrator.hpp"
#include "epilv/model.hpp"
#include "epilv/params.hpp"

namespace epilv::analysis {

using Matrix5d = Eigen::Matrix<double, 5, 5>;
using Vector5cd = Eigen::Matrix<std::complex<double>, 5, 1>;

/// sqrt(B_h B_v / (gamma + mu_h)); the disease invades when this exceeds 1.
double basic_reproduction_number(const DimensionlessParams& p);

/// The two constant disease-free states E1 = (1,0,0,0,0) and E2 = (1,0,1,0,1).
std::pair<State5, State5> disease_free_equilibria();

/// Closed-form endemic equilibrium; empty when R0 < 1.
std::optional<State5> endemic_equilibrium(const DimensionlessParams& p);

/// Analytic Jacobian of the rescaled model in the rearranged variable order
/// (I_h, I_v, S_h, S_v, D) used for the stability analysis.
Matrix5d jacobian(const State5& state, const DimensionlessParams& p);

/// 2x2 linearization of the infective compartments at the disease-free state.
Eigen::Matrix2d infective_block(const DimensionlessParams& p);

/// Largest eigenvalue real part.
double spectral_abscissa(const Eigen::MatrixXd& m);

struct LevelSetBounds {
  double k0;     // level of v_lv, at most -2
  double a;      // lower bound, root of ln x - x = k0 + 1 in (0, 1]
  double b;      // upper bound, root in [1, inf)
  double eco_r0; // B_h B_v / (gamma + mu_h) * b / a
};

/// Bounds of the v_lv level region and the ecological reproduction number.
LevelSetBounds level_set_bounds(double k0, const DimensionlessParams& p);

struct MetzlerReport {
  Eigen::Matrix2d m;
  bool stable; // trace < 0 and det > 0, equivalent to eco_r0 < 1
};

/// Constant-coefficient comparison system that dominates the infectives
/// inside the level region.
MetzlerReport metzler_comparison(const DimensionlessParams& p, double k0);

struct ComparisonReport {
  bool in_region = true;         // samples stayed inside the level region
  double first_exit_time = 0.0;  // meaningful when !in_region
  double max_excess_ih = 0.0;    // max of I_h(t) - z1(t) over the grid
  double max_excess_iv = 0.0;    // max of I_v(t) - z2(t)
  std::vector<double> grid;
  std::vector<double> z1, z2;    // comparison solution on the grid
};

/// Checks the componentwise bound I <= z for z' = M z started at the
/// trajectory's initial infectives.
ComparisonReport comparison_bound_check(const Trajectory& traj, const DimensionlessParams& p,
                                        double k0, int grid_points = 1001);

struct EquilibriumReport {
  std::string label; // "E1", "E2", "Ee"
  State5 state;      // canonical order (S_h, I_h, S_v, I_v, D)
  Matrix5d jacobian; // rearranged order (I_h, I_v, S_h, S_v, D)
  Vector5cd eigenvalues;
  std::string classification;
};

/// Reports for E1, E2 and, when R0 >= 1, Ee.
std::vector<EquilibriumReport> classify_equilibria(const DimensionlessParams& p);

} // namespace epilv::analysis
