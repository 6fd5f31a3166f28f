#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "mmimo/milp/mip.hpp"
#include "mmimo/milp/mps.hpp"

using namespace mmimo::milp;

TEST(Mip, Knapsack) {
  MipProblem p;
  p.lp.sense = ObjSense::Max;
  int x = p.add_var(0, 1, 5, VarType::Binary);
  int y = p.add_var(0, 1, 4, VarType::Binary);
  p.lp.add_constraint({{x, 3}, {y, 2}}, Sense::Le, 4);
  auto s = solve_mip(p);
  ASSERT_EQ(s.status, MipStatus::Optimal);
  EXPECT_NEAR(s.objective, 5.0, 1e-9);
  EXPECT_NEAR(s.x[0], 1.0, 1e-9);
  EXPECT_NEAR(s.x[1], 0.0, 1e-9);
}

TEST(Mip, BigMLeakInsideIntegralityToleranceIsRejected) {
  // u = 1 - 1e-7 with y = 0.99 satisfies the relaxation, but u = 1 does not.
  MipProblem p;
  p.lp.sense = ObjSense::Max;
  int u = p.add_var(0, 1, 1, VarType::Binary);
  int y = p.add_var(0, 0.99, 0, VarType::Continuous);
  p.lp.add_constraint({{u, -1e5}, {y, 1}}, Sense::Ge, 1 - 1e5);
  auto s = solve_mip(p);
  ASSERT_EQ(s.status, MipStatus::Optimal);
  EXPECT_NEAR(s.objective, 0.0, 1e-9);
}

TEST(Mip, PolishedIncumbentSatisfiesRowsExactly) {
  MipProblem p;
  p.lp.sense = ObjSense::Max;
  int u = p.add_var(0, 1, 1, VarType::Binary);
  int x = p.add_var(0, 1, 0, VarType::Continuous);
  // x >= 0.3 + u - 1 - 5e4 (1 - u), x <= 0.3
  p.lp.add_constraint({{x, 1}, {u, -1 - 5e4}}, Sense::Ge, 0.3 - 1 - 5e4);
  p.lp.add_constraint({{x, 1}}, Sense::Le, 0.3);
  auto s = solve_mip(p);
  ASSERT_EQ(s.status, MipStatus::Optimal);
  EXPECT_EQ(s.x[0], 1.0);
  EXPECT_GE(s.x[1], 0.3 - 1e-9);
}

TEST(Mip, IntegralRelaxationNeedsNoBranching) {
  MipProblem p;
  int x = p.add_var(0, 10, 1, VarType::Integer);
  int y = p.add_var(0, 10, 1, VarType::Integer);
  p.lp.add_constraint({{x, 1}}, Sense::Ge, 2);
  p.lp.add_constraint({{y, 1}}, Sense::Ge, 3);
  auto s = solve_mip(p);
  ASSERT_EQ(s.status, MipStatus::Optimal);
  EXPECT_EQ(s.nodes, 1);
  EXPECT_NEAR(s.objective, 5.0, 1e-9);
}

TEST(Mip, ObjectiveAtLeastCeilOfRelaxation) {
  MipProblem p;
  std::vector<int> t;
  for (int c = 0; c < 3; ++c) t.push_back(p.add_var(0, kInf, 1, VarType::Integer));
  // odd cycle cover: relaxation 1.5 per pair structure
  p.lp.add_constraint({{t[0], 1}, {t[1], 1}}, Sense::Ge, 1);
  p.lp.add_constraint({{t[1], 1}, {t[2], 1}}, Sense::Ge, 1);
  p.lp.add_constraint({{t[0], 1}, {t[2], 1}}, Sense::Ge, 1);
  auto s = solve_mip(p);
  ASSERT_EQ(s.status, MipStatus::Optimal);
  EXPECT_NEAR(s.root_lp, 1.5, 1e-9);
  EXPECT_NEAR(s.objective, 2.0, 1e-9);
}

TEST(Mip, InfeasibleAndCutoff) {
  MipProblem p;
  int x = p.add_var(0, 1, 1, VarType::Binary);
  int y = p.add_var(0, 1, 1, VarType::Binary);
  p.lp.add_constraint({{x, 2}, {y, 2}}, Sense::Eq, 1);
  EXPECT_EQ(solve_mip(p).status, MipStatus::Infeasible);

  MipProblem q;
  q.lp.sense = ObjSense::Max;
  int a = q.add_var(0, 1, 1, VarType::Binary);
  int b = q.add_var(0, 1, 1, VarType::Binary);
  q.lp.add_constraint({{a, 1}, {b, 1}}, Sense::Le, 1);
  MipOptions o;
  o.cutoff = 1.0;
  EXPECT_EQ(solve_mip(q, o).status, MipStatus::NoneBetterThanCutoff);
  o.cutoff = 0.5;
  auto s = solve_mip(q, o);
  EXPECT_EQ(s.status, MipStatus::Optimal);
  EXPECT_NEAR(s.objective, 1.0, 1e-9);
}

TEST(Mip, InitialIncumbentIsKept) {
  MipProblem p;
  int x = p.add_var(0, 5, 1, VarType::Integer);
  p.lp.add_constraint({{x, 1}}, Sense::Ge, 2.5);
  MipOptions o;
  o.initial_solution = {3.0};
  auto s = solve_mip(p, o);
  ASSERT_EQ(s.status, MipStatus::Optimal);
  EXPECT_NEAR(s.objective, 3.0, 1e-9);
}

TEST(Mip, NodeLimitReportsTimeout) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  MipProblem p;
  p.lp.sense = ObjSense::Max;
  std::vector<std::pair<int, double>> row;
  for (int j = 0; j < 30; ++j) {
    p.add_var(0, 1, 1 + u(rng), VarType::Binary);
    row.emplace_back(j, 1 + u(rng));
  }
  p.lp.add_constraint(row, Sense::Le, 10.3);
  MipOptions o;
  o.max_nodes = 3;
  auto s = solve_mip(p, o);
  EXPECT_TRUE(s.status == MipStatus::TimeoutNoIncumbent || s.status == MipStatus::TimeoutWithIncumbent);
  EXPECT_GE(s.bound, s.has_solution() ? s.objective : -kInf);
}

// Random binary programs against exhaustive enumeration.
TEST(Mip, MatchesEnumeration) {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 120; ++trial) {
    const int n = 2 + trial % 11;
    const int m = 1 + trial % 5;
    MipProblem p;
    p.lp.sense = trial % 2 ? ObjSense::Max : ObjSense::Min;
    for (int j = 0; j < n; ++j) p.add_var(0, 1, 10 * u(rng) - 5, VarType::Binary);
    const int cont = p.add_var(0, 3, u(rng) - 0.5, VarType::Continuous);
    for (int i = 0; i < m; ++i) {
      std::vector<std::pair<int, double>> row;
      for (int j = 0; j < n; ++j)
        if (u(rng) < 0.7) row.emplace_back(j, 6 * u(rng) - 2);
      row.emplace_back(cont, u(rng));
      p.lp.add_constraint(row, u(rng) < 0.5 ? Sense::Le : Sense::Ge, 4 * u(rng) - 1);
    }
    const double sg = p.lp.sense == ObjSense::Max ? -1 : 1;
    double best = kInf;
    for (int mask = 0; mask < (1 << n); ++mask) {
      // the continuous variable enters linearly: try both ends and let the LP
      // decide, via a one-variable solve
      LinearProgram lp = p.lp;
      for (int j = 0; j < n; ++j) lp.vars[j].lb = lp.vars[j].ub = (mask >> j) & 1;
      auto s = solve_lp(lp);
      if (s.status == LpStatus::Optimal) best = std::min(best, sg * s.objective);
    }
    auto s = solve_mip(p);
    if (best == kInf) {
      EXPECT_EQ(s.status, MipStatus::Infeasible) << trial;
    } else {
      ASSERT_EQ(s.status, MipStatus::Optimal) << trial;
      EXPECT_NEAR(sg * s.objective, best, 1e-7) << trial;
      EXPECT_TRUE(is_feasible(p, s.x));
    }
  }
}

TEST(Mps, WritesSectionsAndMarkers) {
  MipProblem p;
  p.lp.sense = ObjSense::Max;
  int x = p.add_var(0, 1, 5, VarType::Binary, "x");
  int y = p.add_var(-kInf, 4, 1, VarType::Continuous, "y");
  p.lp.add_constraint({{x, 3}, {y, 2}}, Sense::Le, 4, "cap");
  std::ostringstream os;
  write_mps(os, p);
  const std::string s = os.str();
  for (const char* tok : {"NAME", "OBJSENSE", "ROWS", " N  COST", " L  R0000001", "COLUMNS", "'INTORG'",
                          "'INTEND'", "RHS", "BOUNDS", " BV BND       C0000001", " MI BND       C0000002",
                          " UP BND       C0000002", "ENDATA"})
    EXPECT_NE(s.find(tok), std::string::npos) << tok;
}
