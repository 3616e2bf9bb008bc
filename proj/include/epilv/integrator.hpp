#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace epilv {

struct SolverOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double initial_step = 0.0; // 0 means automatic
  long max_steps = 1000000;

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
      throw std::invalid_argument("SolverOptions: tolerances must be strictly positive");
    if (max_steps < 1) throw std::invalid_argument("SolverOptions: max_steps must be >= 1");
  }
};

/// Continuous solution of one integration run. Stores the accepted steps and
/// the quartic interpolation coefficients of the Dormand-Prince pair, so the
/// solution can be evaluated anywhere inside the integrated span.
class Trajectory {
 public:
  Trajectory() = default;

  double start_time() const { return ts_.front(); }
  double end_time() const { return ts_.back(); }
  bool forward() const { return forward_; }
  std::size_t step_count() const { return ts_.empty() ? 0 : ts_.size() - 1; }

  const std::vector<double>& breakpoints() const { return ts_; }
  const std::vector<Eigen::VectorXd>& values() const { return ys_; }

  /// Dense-output evaluation; exact at breakpoints. Throws std::out_of_range
  /// outside the integrated span.
  Eigen::VectorXd value_at(double t) const;

  std::vector<Eigen::VectorXd> sample(const std::vector<double>& grid) const;

 private:
  friend class Dopri5Stepper;

  struct DenseCoeffs {
    Eigen::VectorXd r2, r3, r4, r5; // r1 is the left value itself
  };

  std::vector<double> ts_;
  std::vector<Eigen::VectorXd> ys_;
  std::vector<DenseCoeffs> dense_;
  bool forward_ = true;

  std::size_t locate(double t) const;
};

/// Thrown when a solve cannot be completed; carries whatever was integrated.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, Trajectory partial, double t_fail)
      : std::runtime_error(what), partial(std::move(partial)), t_fail(t_fail) {}
  Trajectory partial;
  double t_fail;
};

using RhsFn = std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>;

/// Adaptive Dormand-Prince 5(4) solve over [t0, t1]; t1 < t0 integrates
/// backward. Local error per step is held below abs_tol + rel_tol*|y|.
Trajectory integrate(const RhsFn& rhs, const Eigen::VectorXd& y0, double t0, double t1,
                     const SolverOptions& opts = {});

/// Dense-output evaluation on an ordered grid inside the trajectory span.
std::vector<Eigen::VectorXd> sample(const Trajectory& traj, const std::vector<double>& grid);

/// Uniform grid of n+1 points with exact endpoints.
std::vector<double> uniform_grid(double t0, double t1, int n);

} // namespace epilv
