#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mmimo/milp/dual_simplex.hpp"
#include "mmimo/milp/lp.hpp"

using namespace mmimo::milp;

TEST(Lp, SingleBoundRow) {
  LinearProgram lp;
  lp.sense = ObjSense::Max;
  int x = lp.add_var(0, kInf, 1.0);
  lp.add_constraint({{x, 1.0}}, Sense::Le, 3.0);
  auto s = solve_lp(lp);
  ASSERT_EQ(s.status, LpStatus::Optimal);
  EXPECT_NEAR(s.x[0], 3.0, 1e-9);
  EXPECT_NEAR(s.duals[0], 1.0, 1e-9);
  EXPECT_NEAR(s.objective, 3.0, 1e-9);
}

TEST(Lp, TextbookMax) {
  LinearProgram lp;
  lp.sense = ObjSense::Max;
  int x = lp.add_var(0, kInf, 3.0);
  int y = lp.add_var(0, kInf, 5.0);
  lp.add_constraint({{x, 1}}, Sense::Le, 4);
  lp.add_constraint({{y, 2}}, Sense::Le, 12);
  lp.add_constraint({{x, 3}, {y, 2}}, Sense::Le, 18);
  auto s = solve_lp(lp);
  ASSERT_EQ(s.status, LpStatus::Optimal);
  EXPECT_NEAR(s.objective, 36.0, 1e-9);
  EXPECT_NEAR(s.x[0], 2.0, 1e-9);
  EXPECT_NEAR(s.x[1], 6.0, 1e-9);
  EXPECT_NEAR(s.duals[0], 0.0, 1e-9);
  EXPECT_NEAR(s.duals[1], 1.5, 1e-9);
  EXPECT_NEAR(s.duals[2], 1.0, 1e-9);
}

TEST(Lp, FreeVariablesAndEquality) {
  LinearProgram lp;
  int x = lp.add_var(-kInf, kInf, 1.0);
  int y = lp.add_var(-kInf, kInf, 1.0);
  lp.add_constraint({{x, 1}, {y, -1}}, Sense::Eq, 1);
  lp.add_constraint({{x, 1}, {y, 1}}, Sense::Ge, 3);
  auto s = solve_lp(lp);
  ASSERT_EQ(s.status, LpStatus::Optimal);
  EXPECT_NEAR(s.objective, 3.0, 1e-9);
  EXPECT_NEAR(s.x[0] - s.x[1], 1.0, 1e-9);
}

TEST(Lp, Infeasible) {
  LinearProgram lp;
  int x = lp.add_var(0, kInf, 1.0);
  lp.add_constraint({{x, 1}}, Sense::Ge, 2);
  lp.add_constraint({{x, 1}}, Sense::Le, 1);
  EXPECT_EQ(solve_lp(lp).status, LpStatus::Infeasible);
}

TEST(Lp, Unbounded) {
  LinearProgram lp;
  lp.sense = ObjSense::Max;
  int x = lp.add_var(0, kInf, 1.0);
  int y = lp.add_var(0, kInf, 0.0);
  lp.add_constraint({{x, 1}, {y, -1}}, Sense::Le, 1);
  EXPECT_EQ(solve_lp(lp).status, LpStatus::Unbounded);
}

TEST(Lp, RedundantDegenerateRows) {
  LinearProgram lp;
  int x = lp.add_var(0, kInf, 1.0);
  int y = lp.add_var(0, kInf, 1.0);
  for (int r = 0; r < 5; ++r) lp.add_constraint({{x, 1}, {y, 1}}, Sense::Ge, 2);
  lp.add_constraint({{x, 2}, {y, 2}}, Sense::Ge, 4);
  lp.add_constraint({{x, 1}}, Sense::Ge, 0);
  auto s = solve_lp(lp);
  ASSERT_EQ(s.status, LpStatus::Optimal);
  EXPECT_NEAR(s.objective, 2.0, 1e-9);
  double sum = 0;
  for (double d : s.duals) sum += d;
  EXPECT_GE(sum, 0.0);
}

TEST(Lp, BadDataRejected) {
  LinearProgram lp;
  lp.add_var(2, 1, 0);
  EXPECT_THROW(lp.validate(), std::invalid_argument);
  LinearProgram lp2;
  lp2.add_var(0, 1, 0);
  lp2.add_constraint({{3, 1.0}}, Sense::Le, 1);
  EXPECT_THROW(solve_lp(lp2), std::invalid_argument);
}

namespace {

LinearProgram random_lp(std::mt19937& rng, int n, int m) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  LinearProgram lp;
  lp.sense = u(rng) < 0.5 ? ObjSense::Min : ObjSense::Max;
  for (int j = 0; j < n; ++j) {
    double lb = u(rng) < 0.2 ? -kInf : -2.0 * u(rng);
    double ub = 1.0 + 5.0 * u(rng);
    lp.add_var(lb, ub, 4.0 * u(rng) - 2.0);
  }
  for (int i = 0; i < m; ++i) {
    std::vector<std::pair<int, double>> row;
    for (int j = 0; j < n; ++j)
      if (u(rng) < 0.6) row.emplace_back(j, 10.0 * u(rng) - 5.0);
    double p = u(rng);
    Sense s = p < 0.45 ? Sense::Le : p < 0.9 ? Sense::Ge : Sense::Eq;
    // rhs chosen around a feasible point x=0.5 keeps most instances feasible
    double act = 0;
    for (auto& [j, a] : row) act += 0.5 * a;
    double rhs = s == Sense::Le ? act + 2 * u(rng) : s == Sense::Ge ? act - 2 * u(rng) : act;
    lp.add_constraint(std::move(row), s, rhs);
  }
  // Free-below variables get a row bound so the instance stays bounded.
  for (int j = 0; j < n; ++j)
    if (lp.vars[j].lb == -kInf) lp.add_constraint({{j, 1.0}}, Sense::Ge, -10.0);
  return lp;
}

}  // namespace

// Primal feasibility, dual sign conditions and complementary slackness
// together certify optimality.
TEST(Lp, RandomOptimalityCertificates) {
  std::mt19937 rng(7);
  int solved = 0;
  for (int trial = 0; trial < 300; ++trial) {
    auto lp = random_lp(rng, 3 + trial % 12, 2 + trial % 9);
    auto s = solve_lp(lp);
    ASSERT_TRUE(s.status == LpStatus::Optimal) << "trial " << trial << " " << to_string(s.status);
    ++solved;
    EXPECT_LT(primal_residual(lp, s.x), 1e-7);
    const double sg = lp.sense == ObjSense::Min ? 1.0 : -1.0;
    double obj = 0;
    for (int j = 0; j < lp.num_vars(); ++j) obj += lp.vars[j].obj * s.x[j];
    EXPECT_NEAR(obj, s.objective, 1e-7 * (1 + std::abs(obj)));
    for (int j = 0; j < lp.num_vars(); ++j) {
      double rc = lp.vars[j].obj;
      for (int i = 0; i < lp.num_constraints(); ++i)
        for (auto& [k, a] : lp.cons[i].row)
          if (k == j) rc -= a * s.duals[i];
      EXPECT_NEAR(rc, s.reduced_costs[j], 1e-6);
      const double d = sg * rc;
      if (d > 1e-6) EXPECT_NEAR(s.x[j], lp.vars[j].lb, 1e-6);
      if (d < -1e-6) EXPECT_NEAR(s.x[j], lp.vars[j].ub, 1e-6);
    }
    for (int i = 0; i < lp.num_constraints(); ++i) {
      const double y = sg * s.duals[i];
      const auto& c = lp.cons[i];
      if (c.sense == Sense::Le) EXPECT_LE(y, 1e-7);
      if (c.sense == Sense::Ge) EXPECT_GE(y, -1e-7);
      if (std::abs(y) > 1e-6) EXPECT_NEAR(s.row_activity[i], c.rhs, 1e-6);
    }
  }
  EXPECT_EQ(solved, 300);
}

TEST(Lp, WarmStartMatchesColdSolve) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    auto lp = random_lp(rng, 8, 6);
    DualSimplex ds(lp);
    ASSERT_EQ(ds.solve(), LpStatus::Optimal);
    int j = trial % 8;
    double mid = ds.primal()[j];
    double nl = lp.vars[j].lb, nu = std::floor(mid);
    if (nu < nl) nu = nl;
    ds.set_bounds(j, nl, nu);
    auto warm = ds.solve();
    lp.vars[j].ub = nu;
    auto cold = solve_lp(lp);
    ASSERT_EQ(warm, cold.status) << trial;
    if (warm == LpStatus::Optimal) EXPECT_NEAR(ds.objective(), cold.objective, 1e-7);
  }
}

TEST(Lp, ParallelKernelsGiveSameAnswer) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    auto lp = random_lp(rng, 20, 15);
    LpOptions a, b;
    b.kernels = kernels::Mode::Parallel;
    auto sa = solve_lp(lp, a);
    auto sb = solve_lp(lp, b);
    ASSERT_EQ(sa.status, sb.status);
    EXPECT_EQ(sa.iterations, sb.iterations);
    for (std::size_t j = 0; j < sa.x.size(); ++j) EXPECT_DOUBLE_EQ(sa.x[j], sb.x[j]);
  }
}

TEST(Kernels, SerialAndParallelBitIdentical) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int m = 37, n = 211;
  CscMatrix a;
  a.rows = m;
  a.cols = n;
  a.start.push_back(0);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < m; ++i)
      if (rng() % 4 == 0) {
        a.index.push_back(i);
        a.value.push_back(u(rng));
      }
    a.start.push_back(static_cast<int>(a.index.size()));
  }
  std::vector<double> rho(m);
  for (double& r : rho) r = u(rng);
  std::vector<double> s(n + m), p(n + m);
  kernels::serial::pivot_row(a, rho, s);
  kernels::parallel::pivot_row(a, rho, p);
  EXPECT_EQ(s, p);

  kernels::serial::update_reduced_costs(s, std::vector<double>(n + m, 0.5), 0.3);
  kernels::parallel::update_reduced_costs(p, std::vector<double>(n + m, 0.5), 0.3);
  EXPECT_EQ(s, p);

  std::vector<double> binv(static_cast<std::size_t>(m) * m), col(m);
  for (double& b : binv) b = u(rng);
  for (double& c : col) c = u(rng);
  col[5] = 0.9;
  std::vector<double> b2 = binv;
  kernels::serial::pivot_inverse(binv, m, col, 5);
  kernels::parallel::pivot_inverse(b2, m, col, 5);
  EXPECT_EQ(binv, b2);
}

TEST(Lp, PerturbationDoesNotChangeOptimum) {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 60; ++trial) {
    auto lp = random_lp(rng, 12, 9);
    LpOptions plain;
    plain.perturb = false;
    auto a = solve_lp(lp, plain);
    auto b = solve_lp(lp);
    ASSERT_EQ(a.status, b.status) << trial;
    if (a.status == LpStatus::Optimal) {
      EXPECT_NEAR(a.objective, b.objective, 1e-7 * std::max(1.0, std::abs(a.objective)));
      EXPECT_LE(primal_residual(lp, b.x), 1e-7);
    }
  }
}

TEST(Lp, DegenerateCoveringProblem) {
  // Many identical columns and tied costs: the case perturbation exists for.
  LinearProgram lp;
  const int rows = 12;
  for (int j = 0; j < 60; ++j) lp.add_var(0, kInf, 1);
  std::vector<std::vector<std::pair<int, double>>> r(rows);
  for (int j = 0; j < 60; ++j)
    for (int k = 0; k < 3; ++k) r[static_cast<std::size_t>((j + 4 * k) % rows)].emplace_back(j, 1.0);
  for (int i = 0; i < rows; ++i) lp.add_constraint(r[static_cast<std::size_t>(i)], Sense::Ge, 2);
  auto s = solve_lp(lp);
  ASSERT_EQ(s.status, LpStatus::Optimal);
  EXPECT_NEAR(s.objective, 8.0, 1e-9);
  LpOptions plain;
  plain.perturb = false;
  EXPECT_NEAR(solve_lp(lp, plain).objective, 8.0, 1e-9);
}
