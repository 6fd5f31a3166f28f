// Serial reference against OpenMP variants of the simplex kernels, plus
// whole solves of a frame master problem under both modes.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "mmimo/colgen.hpp"
#include "mmimo/milp/dual_simplex.hpp"
#include "mmimo/milp/kernels.hpp"
#include "mmimo/scenarios.hpp"

using namespace mmimo;
using namespace mmimo::milp;

namespace {

CscMatrix random_matrix(int m, int n, double density) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  CscMatrix a;
  a.rows = m;
  a.cols = n;
  a.start.push_back(0);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < m; ++i)
      if (u(rng) * 0.5 + 0.5 < density) {
        a.index.push_back(i);
        a.value.push_back(u(rng));
      }
    a.start.push_back(static_cast<int>(a.index.size()));
  }
  return a;
}

kernels::Mode mode_of(const benchmark::State& st) {
  return st.range(1) ? kernels::Mode::Parallel : kernels::Mode::Serial;
}

void BM_PivotRow(benchmark::State& st) {
  const int m = static_cast<int>(st.range(0));
  const CscMatrix a = random_matrix(m, 8 * m, 0.3);
  std::vector<double> rho(static_cast<std::size_t>(m), 0.5), alpha(static_cast<std::size_t>(9 * m));
  for (auto _ : st) {
    kernels::pivot_row(mode_of(st), a, rho, alpha);
    benchmark::DoNotOptimize(alpha.data());
  }
}

void BM_UpdateReducedCosts(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0)) * 9;
  std::vector<double> d(n, 1.0), alpha(n, 1e-3);
  for (auto _ : st) {
    kernels::update_reduced_costs(mode_of(st), d, alpha, 1e-6);
    benchmark::DoNotOptimize(d.data());
  }
}

void BM_PivotInverse(benchmark::State& st) {
  const int m = static_cast<int>(st.range(0));
  std::vector<double> binv(static_cast<std::size_t>(m) * m, 0.0), col(static_cast<std::size_t>(m), 1e-3);
  for (int i = 0; i < m; ++i) binv[static_cast<std::size_t>(i) * m + i] = 1.0;
  col[0] = 1.0;
  for (auto _ : st) {
    kernels::pivot_inverse(mode_of(st), binv, m, col, 0);
    benchmark::DoNotOptimize(binv.data());
  }
}

void BM_FrameMaster(benchmark::State& st) {
  const Instance inst = build_instance(6, 1);
  CgOptions o;
  o.iter_cap = 150;
  static const CgResult cg = run_cg(inst, Precoder::MRC, PowerScheme::Optimal, o);
  LinearProgram lp;
  std::vector<std::vector<std::pair<int, double>>> rows(2 * static_cast<std::size_t>(inst.size()));
  for (const CompatibleSet& c : cg.pool.sets()) {
    const int j = lp.add_var(0, kInf, 1);
    for (int k : c.tx) rows[static_cast<std::size_t>(k)].emplace_back(j, 1.0);
    for (int k : c.rx) rows[static_cast<std::size_t>(inst.size() + k)].emplace_back(j, 1.0);
  }
  for (int k = 0; k < inst.size(); ++k) {
    lp.add_constraint(rows[static_cast<std::size_t>(k)], Sense::Ge, inst.device(k).up_demand);
    lp.add_constraint(rows[static_cast<std::size_t>(inst.size() + k)], Sense::Ge, inst.device(k).down_demand);
  }
  LpOptions opts;
  opts.kernels = mode_of(st);
  for (auto _ : st) {
    LpSolution s = solve_lp(lp, opts);
    benchmark::DoNotOptimize(s.objective);
  }
}

}  // namespace

BENCHMARK(BM_PivotRow)->ArgsProduct({{64, 256, 1024}, {0, 1}})->ArgNames({"m", "parallel"});
BENCHMARK(BM_UpdateReducedCosts)->ArgsProduct({{64, 256, 1024}, {0, 1}})->ArgNames({"m", "parallel"});
BENCHMARK(BM_PivotInverse)->ArgsProduct({{64, 256, 1024}, {0, 1}})->ArgNames({"m", "parallel"});
BENCHMARK(BM_FrameMaster)->Args({0, 0})->Args({0, 1})->ArgNames({"", "parallel"})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
