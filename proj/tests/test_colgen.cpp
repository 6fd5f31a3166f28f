#include <gtest/gtest.h>

#include <cmath>

#include "mmimo/colgen.hpp"
#include "mmimo/errors.hpp"
#include "mmimo/scenarios.hpp"

using namespace mmimo;

namespace {

const Precoder kPrecoders[] = {Precoder::MRC, Precoder::ZF};
const PowerScheme kSchemes[] = {PowerScheme::Optimal, PowerScheme::Fair, PowerScheme::Static,
                                PowerScheme::Downlink};

int singleton_frame(const Instance& inst) {
  int total = 0;
  for (const Device& d : inst.devices) total += std::max(d.up_demand, d.down_demand);
  return total;
}

}  // namespace

TEST(Pool, RejectsDuplicates) {
  ColumnPool pool;
  CompatibleSet a = make_cset({0}, {1}, PowerVector{{1.0, 0.0}, {0.0, 1.0}});
  EXPECT_TRUE(pool.add(a));
  EXPECT_FALSE(pool.add(a));
  EXPECT_TRUE(pool.contains(a));
  EXPECT_EQ(pool.size(), 1);
  CompatibleSet b = make_cset({0}, {1}, PowerVector{{0.5, 0.0}, {0.0, 1.0}});
  EXPECT_TRUE(pool.add(b));
}

TEST(Master, SingletonPoolCostsSumOfLargerDemands) {
  const Instance inst = build_instance(1, 1);
  for (Precoder p : kPrecoders)
    for (PowerScheme s : kSchemes) {
      const ColumnPool pool = initial_pool(inst, p, s);
      EXPECT_EQ(pool.size(), inst.size());
      const MasterSolution m = solve_master(inst, pool);
      EXPECT_NEAR(m.objective, 240.0, 1e-9);
    }
}

TEST(Master, SingletonDualsSplitUnitCost) {
  for (int e = 1; e <= 6; ++e)
    for (int sc = 1; sc <= 6; ++sc) {
      const Instance inst = build_instance(e, sc);
      const ColumnPool pool = initial_pool(inst, Precoder::MRC, PowerScheme::Optimal);
      const MasterSolution m = solve_master(inst, pool);
      EXPECT_NEAR(m.objective, singleton_frame(inst), 1e-9);
      for (int k = 0; k < inst.size(); ++k)
        EXPECT_NEAR(m.duals.up[static_cast<std::size_t>(k)] + m.duals.down[static_cast<std::size_t>(k)],
                    1.0, 1e-9);
    }
}

TEST(Master, SingleDeviceNeedsLargerDemand) {
  Instance inst;
  inst.devices.push_back(make_device(0, 1.0, 3, 7, 1.0, inst.params));
  const CgResult r = run_cg(inst, Precoder::ZF, PowerScheme::Static);
  EXPECT_NEAR(r.master.objective, 7.0, 1e-9);
  const Schedule s = solve_frame_ip(inst, r.pool, r.master);
  EXPECT_EQ(s.frame_size, 7);
  EXPECT_TRUE(validate_schedule(inst, Precoder::ZF, PowerScheme::Static, s).ok);
}

TEST(ColumnGeneration, MonotoneAndSparse) {
  const Instance inst = build_instance(experiment4(10.0), scenario(1));
  for (Precoder p : kPrecoders)
    for (PowerScheme s : kSchemes) {
      const CgResult r = run_cg(inst, p, s);
      ASSERT_TRUE(r.proven) << to_string(p) << " " << to_string(s);
      for (std::size_t i = 1; i < r.log.size(); ++i)
        EXPECT_LE(r.log[i].objective, r.log[i - 1].objective + 1e-7);
      EXPECT_LE(r.master.nonzeros(), 2 * inst.size());
      EXPECT_EQ(r.stop_reason, "converged");
    }
}

TEST(ColumnGeneration, RelaxationIndependentOfStartingPool) {
  const Instance inst = build_instance(experiment4(15.0), scenario(1));
  const CgResult a = run_cg(inst, Precoder::MRC, PowerScheme::Optimal);

  CgOptions o;
  ColumnPool start = initial_pool(inst, Precoder::MRC, PowerScheme::Optimal);
  for (int k = 0; k + 1 < inst.size(); k += 2) {
    const std::vector<int> tx{k}, rx{k + 1};
    if (auto pw = scheme_powers(inst, Precoder::MRC, PowerScheme::Optimal, tx, rx)) {
      CompatibleSet c;
      c.tx = tx;
      c.rx = rx;
      c.eta_up = {pw->up[static_cast<std::size_t>(k)]};
      c.eta_down = {pw->down[static_cast<std::size_t>(k + 1)]};
      start.add(c);
    }
  }
  o.initial = start;
  const CgResult b = run_cg(inst, Precoder::MRC, PowerScheme::Optimal, o);
  EXPECT_NEAR(a.master.objective, b.master.objective, 1e-6);
}

TEST(ColumnGeneration, IterationCapStops) {
  const Instance inst = build_instance(1, 1);
  CgOptions o;
  o.iter_cap = 5;
  const CgResult r = run_cg(inst, Precoder::ZF, PowerScheme::Optimal, o);
  EXPECT_EQ(r.stop_reason, "iter_cap");
  EXPECT_FALSE(r.proven);
  EXPECT_LE(r.pool.size(), inst.size() + 5);
}

TEST(ColumnGeneration, InfeasibleDeviceNamed) {
  Instance inst;
  inst.devices.push_back(make_device(0, 1.0, 1, 1, 1.0, inst.params));
  inst.devices.push_back(make_device(1, 1e-9, 1, 1, 1e3, inst.params));
  try {
    initial_pool(inst, Precoder::MRC, PowerScheme::Optimal);
    FAIL() << "expected InstanceInfeasibleError";
  } catch (const InstanceInfeasibleError& e) {
    EXPECT_EQ(e.device(), 1);
  }
}

TEST(Frame, RoundingAndIpRespectBounds) {
  const Instance inst = build_instance(experiment4(20.0), scenario(1));
  for (PowerScheme s : kSchemes) {
    const CgResult r = run_cg(inst, Precoder::MRC, s);
    const Bounds b = lower_bounds(inst, r.master.objective);
    const Schedule up = round_up(r.pool, r.master);
    const Schedule ip = solve_frame_ip(inst, r.pool, r.master);
    const Schedule h = heuristic_frame_ip(inst, r.pool, r.master);
    for (const Schedule* sc : {&up, &ip, &h}) {
      EXPECT_TRUE(validate_schedule(inst, Precoder::MRC, s, *sc).ok) << sc->status;
      EXPECT_GE(sc->frame_size, b.lp_bound);
      EXPECT_LE(sc->frame_size, b.lp_bound + 2 * inst.size());
    }
    EXPECT_LE(ip.frame_size, up.frame_size);
    EXPECT_LE(ip.frame_size, h.frame_size);
  }
}

TEST(Frame, ValidationCatchesShortCoverage) {
  const Instance inst = build_instance(experiment4(5.0), scenario(1));
  const CgResult r = run_cg(inst, Precoder::ZF, PowerScheme::Optimal);
  Schedule s = solve_frame_ip(inst, r.pool, r.master);
  ASSERT_TRUE(validate_schedule(inst, Precoder::ZF, PowerScheme::Optimal, s).ok);
  ASSERT_FALSE(s.entries.empty());
  s.entries.front().blocks -= 1;
  s.frame_size -= 1;
  const ScheduleReport rep = validate_schedule(inst, Precoder::ZF, PowerScheme::Optimal, s);
  EXPECT_FALSE(rep.ok);
  EXPECT_TRUE(rep.reason == "covering_up" || rep.reason == "covering_down") << rep.reason;
}

TEST(Frame, ValidationCatchesWrongFrameSize) {
  const Instance inst = build_instance(experiment4(5.0), scenario(1));
  const CgResult r = run_cg(inst, Precoder::ZF, PowerScheme::Optimal);
  Schedule s = solve_frame_ip(inst, r.pool, r.master);
  s.frame_size += 1;
  EXPECT_FALSE(validate_schedule(inst, Precoder::ZF, PowerScheme::Optimal, s).ok);
}

TEST(Bounds, Pigeonhole) {
  // 20 devices at 10 blocks and 20 at 2 over 12 pilots.
  EXPECT_EQ(lower_bounds(build_instance(1, 1)).pigeonhole, 20);
  // 40 devices at 10 blocks.
  EXPECT_EQ(lower_bounds(build_instance(1, 3)).pigeonhole, 34);
  EXPECT_EQ(lower_bounds(build_instance(1, 1)).lp_bound, 0);
  EXPECT_EQ(lower_bounds(build_instance(1, 1), 12.2353).lp_bound, 13);
  EXPECT_EQ(lower_bounds(build_instance(1, 1), 20.0000001).lp_bound, 20);
}

TEST(Metrics, OptimalPowerBelowStaticOnSingletons) {
  const Instance inst = build_instance(1, 2);
  const ColumnPool a = initial_pool(inst, Precoder::MRC, PowerScheme::Optimal);
  const ColumnPool b = initial_pool(inst, Precoder::MRC, PowerScheme::Static);
  const Schedule sa = round_up(a, solve_master(inst, a));
  const Schedule sb = round_up(b, solve_master(inst, b));
  EXPECT_EQ(sa.frame_size, sb.frame_size);
  EXPECT_LE(schedule_metrics(sa).total_power, schedule_metrics(sb).total_power);
}

TEST(Metrics, HandComputed) {
  Schedule s;
  s.entries.push_back({make_cset({0}, {1}, PowerVector{{0.5, 0.0}, {0.0, 0.25}}), 3});
  s.entries.push_back({make_cset({1}, {}, PowerVector{{0.0, 1.0}, {0.0, 0.0}}), 2});
  s.frame_size = 5;
  const ScheduleMetrics m = schedule_metrics(s);
  EXPECT_NEAR(m.total_power, 3 * 0.5 + 3 * 0.25 + 2 * 1.0, 1e-12);
  EXPECT_NEAR(m.max_node_power, 3 * 0.25 + 2 * 1.0, 1e-12);
  const auto j = schedule_to_json(s);
  EXPECT_EQ(j["frame"], 5);
  EXPECT_EQ(j["csets"].size(), 2u);
}
