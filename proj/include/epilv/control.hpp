#pragma once

#include <Eigen/Dense>
#include <vector>

#include "epilv/integrator.hpp"
#include "epilv/model.hpp"
#include "epilv/params.hpp"

namespace epilv::control {

using Adjoint5 = Eigen::Matrix<double, 5, 1>; // costates paired with (S_h, I_h, S_v, I_v, D)

struct CostWeights {
  double c = 1.0;     // quadratic control weight
  double q = 1.0;     // linear control weight
  double r = 5.0;     // infected-host running weight
  double a = 5.0;     // terminal susceptible reward weight
  double u_max = 0.5; // control upper bound
  double T = 120.0;   // horizon

  void validate() const;
};

/// Bounded control on [0, T] stored on a uniform grid with piecewise-linear
/// interpolation between nodes.
class ControlSignal {
 public:
  ControlSignal(double horizon, Eigen::VectorXd values);
  static ControlSignal constant(double horizon, int intervals, double value);

  double horizon() const { return horizon_; }
  int intervals() const { return static_cast<int>(values_.size()) - 1; }
  const Eigen::VectorXd& values() const { return values_; }
  Eigen::VectorXd& values() { return values_; }
  double node_time(int i) const;
  double value_at(double t) const;

 private:
  double horizon_;
  Eigen::VectorXd values_;
};

/// Pontryagin Hamiltonian with the objective multiplier normalized to 1.
double hamiltonian(const State5& state, double u, const Adjoint5& p,
                   const DimensionlessParams& params, const CostWeights& w);

/// Costate equations; equals -dH/dX componentwise.
Adjoint5 adjoint_rhs(const Adjoint5& p, const State5& state, const DimensionlessParams& params,
                     const CostWeights& w);

/// Pointwise maximizer of u -> p5 u - c u^2 - q u over [0, u_max]. For c = 0
/// the switching tie |p5 - q| <= tie_eps resolves to tie_value (the previous
/// iterate's value during the sweep).
double optimal_u(double p5, const CostWeights& w, double tie_value = 0.0,
                 double tie_eps = 1e-10);

/// Running cost plus terminal term in minimization form:
/// integral of (c u^2 + q u + r I_h) minus a S_h(T), composite Simpson on the
/// control grid (intervals must be even).
double objective(const Trajectory& state, const ControlSignal& u, const CostWeights& w);

struct SweepOptions {
  double relaxation = 0.1; // weight kept on the previous control iterate
  double u0 = 0.1;         // initial control level
  int grid_size = 2000;    // intervals of the control grid, even
  double tol_abs = 1e-6;
  double tol_rel = 1e-4;
  int max_iterations = 200;
  SolverOptions solver;

  void validate() const;
};

struct SweepResult {
  ControlSignal control;
  Trajectory state;
  Trajectory adjoint;
  std::vector<double> objective_history; // one entry per iteration
  int iterations = 0;
  bool converged = false;
  double control_change = 0.0;      // final max-norm update
  double pointwise_residual = 0.0;  // max |u_i - optimal_u(p5(t_i))| of the result
  double objective_value = 0.0;     // objective of the returned control
  double best_objective = 0.0;      // smallest objective seen across iterations
};

class SweepError : public std::runtime_error {
 public:
  SweepError(const std::string& what, int iteration)
      : std::runtime_error(what), iteration(iteration) {}
  int iteration;
};

/// Forward-backward sweep with relaxed control updates.
SweepResult sweep_solve(const DimensionlessParams& params, const CostWeights& w,
                        const State5& x0, const SweepOptions& opts = {});

/// Forward solve of the controlled system under a fixed control.
Trajectory integrate_controlled(const DimensionlessParams& params, const ControlSignal& u,
                                const State5& x0, const SolverOptions& solver = {});

/// Backward adjoint solve against a forward state trajectory.
Trajectory integrate_adjoint(const DimensionlessParams& params, const CostWeights& w,
                             const Trajectory& state, const SolverOptions& solver = {});

struct BumpSpec {
  double t1;          // perturbed subinterval
  double t2;
  double eps = 1e-5;  // bump height
};

struct GradientCheckReport {
  double fd_derivative;      // central difference of the maximization objective
  double adjoint_integral;   // discrete integral of (p5 - 2 c u - q) over [t1, t2]
  double relative_discrepancy;
};

/// Compares the finite-difference directional derivative of the objective
/// against the adjoint-based expression on a strictly interior arc.
GradientCheckReport gradient_check(const ControlSignal& u, const DimensionlessParams& params,
                                   const CostWeights& w, const State5& x0, const BumpSpec& bump,
                                   const SolverOptions& solver = {});

} // namespace epilv::control
