#include "epilv/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace epilv {
namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;

constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;

// Difference between the 5th- and 4th-order weights.
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

// Dense-output weights of the standard continuous extension.
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 5.0;

double error_norm(const Eigen::VectorXd& err, const Eigen::VectorXd& y_old,
                  const Eigen::VectorXd& y_new, const SolverOptions& opts) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < err.size(); ++i) {
    const double sc =
        opts.abs_tol + opts.rel_tol * std::max(std::abs(y_old[i]), std::abs(y_new[i]));
    const double q = err[i] / sc;
    sum += q * q;
  }
  return std::sqrt(sum / static_cast<double>(err.size()));
}

double initial_step_guess(const RhsFn& rhs, double t0, const Eigen::VectorXd& y0,
                          const Eigen::VectorXd& f0, double dir, double span,
                          const SolverOptions& opts) {
  double d0 = 0.0, d1n = 0.0;
  for (Eigen::Index i = 0; i < y0.size(); ++i) {
    const double sc = opts.abs_tol + opts.rel_tol * std::abs(y0[i]);
    d0 += (y0[i] / sc) * (y0[i] / sc);
    d1n += (f0[i] / sc) * (f0[i] / sc);
  }
  d0 = std::sqrt(d0 / static_cast<double>(y0.size()));
  d1n = std::sqrt(d1n / static_cast<double>(y0.size()));
  double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
  h0 = std::min(h0, span);

  const Eigen::VectorXd y1 = y0 + dir * h0 * f0;
  const Eigen::VectorXd f1 = rhs(t0 + dir * h0, y1);
  double d2 = 0.0;
  for (Eigen::Index i = 0; i < y0.size(); ++i) {
    const double sc = opts.abs_tol + opts.rel_tol * std::abs(y0[i]);
    const double q = (f1[i] - f0[i]) / sc;
    d2 += q * q;
  }
  d2 = std::sqrt(d2 / static_cast<double>(y0.size())) / h0;

  double h1;
  if (std::max(d1n, d2) <= 1e-15) {
    h1 = std::max(1e-6, h0 * 1e-3);
  } else {
    h1 = std::pow(0.01 / std::max(d1n, d2), 0.2);
  }
  return std::min({100.0 * h0, h1, span});
}

} // namespace

std::size_t Trajectory::locate(double t) const {
  const double lo = ts_.front(), hi = ts_.back();
  const double span = std::abs(hi - lo);
  const double slack = std::max(span, std::max(std::abs(lo), std::abs(hi))) *
                       16.0 * std::numeric_limits<double>::epsilon();
  const double a = forward_ ? lo : hi, b = forward_ ? hi : lo;
  if (t < a - slack || t > b + slack) {
    throw std::out_of_range("Trajectory: time " + std::to_string(t) + " outside span [" +
                            std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  // Index of the step whose interval contains t.
  if (forward_) {
    auto it = std::upper_bound(ts_.begin(), ts_.end(), t);
    std::size_t i = static_cast<std::size_t>(std::distance(ts_.begin(), it));
    if (i == 0) return 0;
    if (i >= ts_.size()) return ts_.size() - 2;
    return i - 1;
  }
  auto it = std::upper_bound(ts_.begin(), ts_.end(), t, std::greater<double>());
  std::size_t i = static_cast<std::size_t>(std::distance(ts_.begin(), it));
  if (i == 0) return 0;
  if (i >= ts_.size()) return ts_.size() - 2;
  return i - 1;
}

Eigen::VectorXd Trajectory::value_at(double t) const {
  if (ts_.empty()) throw std::out_of_range("Trajectory: empty");
  // Exact at breakpoints.
  for (std::size_t probe : {std::size_t{0}, ts_.size() - 1}) {
    if (t == ts_[probe]) return ys_[probe];
  }
  const std::size_t i = locate(t);
  if (t == ts_[i]) return ys_[i];
  if (t == ts_[i + 1]) return ys_[i + 1];
  const double h = ts_[i + 1] - ts_[i];
  const double theta = (t - ts_[i]) / h;
  const double om = 1.0 - theta;
  const DenseCoeffs& c = dense_[i];
  return ys_[i] + theta * (c.r2 + om * (c.r3 + theta * (c.r4 + om * c.r5)));
}

std::vector<Eigen::VectorXd> Trajectory::sample(const std::vector<double>& grid) const {
  std::vector<Eigen::VectorXd> out;
  out.reserve(grid.size());
  for (double t : grid) out.push_back(value_at(t));
  return out;
}

std::vector<Eigen::VectorXd> sample(const Trajectory& traj, const std::vector<double>& grid) {
  return traj.sample(grid);
}

std::vector<double> uniform_grid(double t0, double t1, int n) {
  if (n < 1) throw std::invalid_argument("uniform_grid: n must be >= 1");
  std::vector<double> g(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) {
    g[static_cast<std::size_t>(i)] =
        t0 + (t1 - t0) * (static_cast<double>(i) / static_cast<double>(n));
  }
  g.front() = t0;
  g.back() = t1;
  return g;
}

// Accumulates accepted steps into a Trajectory; kept as a named friend so the
// storage layout stays private to this translation unit.
class Dopri5Stepper {
 public:
  static Trajectory run(const RhsFn& rhs, const Eigen::VectorXd& y0, double t0, double t1,
                        const SolverOptions& opts) {
    opts.validate();
    if (t0 == t1) throw std::invalid_argument("integrate: t0 and t1 must differ");
    if (!y0.allFinite()) throw std::domain_error("integrate: non-finite initial state");

    const double dir = (t1 > t0) ? 1.0 : -1.0;
    const double span = std::abs(t1 - t0);

    Trajectory traj;
    traj.forward_ = dir > 0.0;
    traj.ts_.push_back(t0);
    traj.ys_.push_back(y0);

    auto fail = [&](const std::string& msg, double t_fail) {
      throw IntegrationError(msg, traj, t_fail);
    };

    Eigen::VectorXd y = y0;
    double t = t0;
    Eigen::VectorXd k1 = rhs(t, y);
    if (!k1.allFinite()) fail("integrate: non-finite RHS at t=" + std::to_string(t), t);

    double h = (opts.initial_step > 0.0)
                   ? std::min(opts.initial_step, span)
                   : initial_step_guess(rhs, t0, y0, k1, dir, span, opts);

    const Eigen::Index n = y0.size();
    Eigen::VectorXd k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), y_new(n), err(n);

    for (long step = 0; step < opts.max_steps; ++step) {
      if (!(h > std::abs(t) * std::numeric_limits<double>::epsilon() * 4.0) || !(h > 0.0) ||
          !std::isfinite(h)) {
        fail("integrate: step size underflow at t=" + std::to_string(t), t);
      }
      bool last = false;
      if (std::abs(t1 - t) <= h) {
        h = std::abs(t1 - t);
        last = true;
      }
      const double hs = dir * h;

      k2 = rhs(t + c2 * hs, y + hs * (a21 * k1));
      k3 = rhs(t + c3 * hs, y + hs * (a31 * k1 + a32 * k2));
      k4 = rhs(t + c4 * hs, y + hs * (a41 * k1 + a42 * k2 + a43 * k3));
      k5 = rhs(t + c5 * hs, y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      k6 = rhs(t + hs, y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      y_new = y + hs * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
      const double t_new = last ? t1 : t + hs;
      k7 = rhs(t_new, y_new);
      if (!k7.allFinite() || !y_new.allFinite()) {
        fail("integrate: non-finite RHS at t=" + std::to_string(t_new), t_new);
      }

      err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      const double en = error_norm(err, y, y_new, opts);

      if (en <= 1.0) {
        Trajectory::DenseCoeffs dc;
        dc.r2 = y_new - y;
        dc.r3 = hs * k1 - dc.r2;
        dc.r4 = dc.r2 - hs * k7 - dc.r3;
        dc.r5 = hs * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
        traj.ts_.push_back(t_new);
        traj.ys_.push_back(y_new);
        traj.dense_.push_back(std::move(dc));

        if (last) return traj;
        t = t_new;
        y = y_new;
        k1.swap(k7); // first-same-as-last
      }

      const double factor =
          (en == 0.0) ? kMaxFactor
                      : std::clamp(kSafety * std::pow(en, -0.2), kMinFactor, kMaxFactor);
      h *= factor;
    }
    fail("integrate: max step count exceeded at t=" + std::to_string(t), t);
    return traj; // unreachable
  }
};

Trajectory integrate(const RhsFn& rhs, const Eigen::VectorXd& y0, double t0, double t1,
                     const SolverOptions& opts) {
  return Dopri5Stepper::run(rhs, y0, t0, t1, opts);
}

} // namespace epilv
