#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "epilv/analysis.hpp"

using namespace epilv;
using namespace epilv::analysis;

namespace {

DimensionlessParams table_nd() {
  DimensionalParams p;
  p.mu_h = 3.4e-5;
  p.mu_v = 0.0125;
  p.mu_D = 0.15;
  p.gamma = 0.14;
  p.alpha = 0.3;
  p.eta = 0.1;
  p.b = 0.7;
  p.beta_h = 0.45;
  p.beta_v = 0.55;
  p.N_h = 10.0;
  return nondimensionalize(p).params;
}

DimensionlessParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> logu(std::log(1e-3), std::log(1e2));
  auto draw = [&] { return std::exp(logu(rng)); };
  return {draw(), draw(), draw(), draw(), draw()};
}

} // namespace

TEST_CASE("baseline reproduction number") {
  CHECK(basic_reproduction_number(table_nd()) ==
        doctest::Approx(3.2237363590939005).epsilon(1e-12));
}

TEST_CASE("endemic equilibrium solves the model exactly") {
  const auto nd = table_nd();
  const auto ee = endemic_equilibrium(nd);
  REQUIRE(ee.has_value());
  CHECK((*ee)[0] == doctest::Approx(0.09687332800859577).epsilon(1e-12));
  CHECK((*ee)[1] == doctest::Approx(0.00021927751008831952).epsilon(1e-12));
  CHECK((*ee)[2] == doctest::Approx(0.9932915597992448).epsilon(1e-12));
  CHECK((*ee)[3] == doctest::Approx(0.006708440200755263).epsilon(1e-12));
  CHECK((*ee)[4] == 1.0);
  CHECK(rhs_dimensionless(*ee, nd).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("endemic equilibrium disappears below threshold") {
  DimensionlessParams p{0.1, 0.1, 0.01, 1.0, 1.0}; // R0 well below one
  CHECK(basic_reproduction_number(p) < 1.0);
  CHECK_FALSE(endemic_equilibrium(p).has_value());
}

TEST_CASE("endemic residual is tiny for random supercritical draws") {
  std::mt19937_64 rng(2024);
  int found = 0;
  while (found < 100) {
    const auto p = random_params(rng);
    const auto ee = endemic_equilibrium(p);
    if (!ee) continue;
    ++found;
    const double scale = std::max(1.0, ee->cwiseAbs().maxCoeff());
    CHECK(rhs_dimensionless(*ee, p).cwiseAbs().maxCoeff() < 1e-10 * scale);
  }
}

TEST_CASE("analytic Jacobian matches central differences") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(0.05, 2.0);
  const int idx[5] = {1, 3, 0, 2, 4}; // canonical index of each rearranged row
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = random_params(rng);
    State5 x;
    for (int i = 0; i < 5; ++i) x[i] = unif(rng);
    const Matrix5d j = jacobian(x, p);
    const double h = 1e-6;
    for (int col = 0; col < 5; ++col) {
      State5 xp = x, xm = x;
      xp[idx[col]] += h;
      xm[idx[col]] -= h;
      const State5 fd5 = (rhs_dimensionless(xp, p) - rhs_dimensionless(xm, p)) / (2.0 * h);
      for (int row = 0; row < 5; ++row) {
        CHECK(j(row, col) == doctest::Approx(fd5[idx[row]]).scale(1.0).epsilon(1e-5));
      }
    }
  }
}

TEST_CASE("infective block sign matches the threshold") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = random_params(rng);
    const double r0 = basic_reproduction_number(p);
    if (std::abs(r0 - 1.0) < 1e-6) continue;
    const double s = spectral_abscissa(infective_block(p));
    CHECK(((r0 > 1.0) == (s > 0.0)));
  }
}

TEST_CASE("level-set bounds at the degenerate level") {
  const auto lb = level_set_bounds(-2.0, table_nd());
  CHECK(lb.a == 1.0);
  CHECK(lb.b == 1.0);
}

TEST_CASE("level-set bounds at k0 = -3") {
  const auto lb = level_set_bounds(-3.0, table_nd());
  CHECK(lb.a == doctest::Approx(0.15859433956303937).epsilon(1e-10));
  CHECK(lb.b == doctest::Approx(3.1461932206205825).epsilon(1e-10));
  CHECK(lb.eco_r0 == doctest::Approx(206.16585675183688).epsilon(1e-10));
  // The bounds really are roots of ln x - x = k0 + 1.
  CHECK(std::log(lb.a) - lb.a == doctest::Approx(-2.0).epsilon(1e-10));
  CHECK(std::log(lb.b) - lb.b == doctest::Approx(-2.0).epsilon(1e-10));
}

TEST_CASE("levels above -2 are rejected") {
  CHECK_THROWS_AS(level_set_bounds(-1.5, table_nd()), std::domain_error);
}

TEST_CASE("comparison matrix stability agrees with the orbit threshold") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> k0dist(-6.0, -2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = random_params(rng);
    const double k0 = k0dist(rng);
    const auto lb = level_set_bounds(k0, p);
    const auto mz = metzler_comparison(p, k0);
    CHECK(mz.stable == (lb.eco_r0 < 1.0));
    if (mz.stable) CHECK(spectral_abscissa(mz.m) < 0.0);
  }
}

TEST_CASE("comparison system dominates the infectives in a stable region") {
  // Weak transmission so the orbit-wide reproduction number is below one.
  DimensionlessParams p{0.05, 0.5, 0.01, 1.0, 1.0};
  const double k0 = -2.1;
  CHECK(level_set_bounds(k0, p).eco_r0 < 1.0);
  State5 x0;
  x0 << 0.5, 0.01, 0.99, 0.01, 1.0; // N_v = 1, D = 1: center of the orbit family
  const Trajectory traj = integrate(
      [&p](double, const Eigen::VectorXd& y) -> Eigen::VectorXd {
        return rhs_dimensionless(y, p);
      },
      x0, 0.0, 20.0);
  const auto rep = comparison_bound_check(traj, p, k0);
  CHECK(rep.in_region);
  CHECK(rep.max_excess_ih <= 1e-8);
  CHECK(rep.max_excess_iv <= 1e-8);
}

TEST_CASE("equilibrium catalogue for the baseline parameters") {
  const auto reports = classify_equilibria(table_nd());
  REQUIRE(reports.size() == 3);
  CHECK(reports[0].label == "E1");
  CHECK(reports[0].classification == "unstable (non-hyperbolic)");
  CHECK(reports[1].label == "E2");
  CHECK(reports[1].classification == "unstable (R0 > 1)");
  CHECK(reports[2].label == "Ee");

  // The endemic linearization: three strictly stable directions plus one
  // conjugate pair sitting on the imaginary axis.
  int stable = 0, imaginary = 0;
  for (int i = 0; i < 5; ++i) {
    const double re = reports[2].eigenvalues[i].real();
    if (re < -1e-6) ++stable;
    else if (std::abs(re) <= 1e-6) ++imaginary;
  }
  CHECK(stable == 3);
  CHECK(imaginary == 2);
}
