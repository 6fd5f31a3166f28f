#include <gtest/gtest.h>

#include <random>

#include "mmimo/errors.hpp"
#include "mmimo/pricing.hpp"
#include "oracle/pricing_oracle.hpp"
#include "oracle/random_instance.hpp"

using namespace mmimo;

namespace {

const Precoder kPrecoders[] = {Precoder::MRC, Precoder::ZF};
const PowerScheme kSchemes[] = {PowerScheme::Optimal, PowerScheme::Fair, PowerScheme::Static,
                                PowerScheme::Downlink};

Instance two_devices() {
  Instance inst;
  inst.devices.push_back(make_device(0, 1.0, 2, 2, 1.0, inst.params));
  inst.devices.push_back(make_device(1, 0.5, 1, 3, 1.0, inst.params));
  return inst;
}

int count(const milp::MipProblem& p, milp::VarType t) {
  return static_cast<int>(std::count(p.types.begin(), p.types.end(), t));
}

}  // namespace

TEST(PricingModel, MrcOptimalVariableCounts) {
  const Instance inst = two_devices();
  const auto m = build_pricing(inst, Precoder::MRC, PowerScheme::Optimal, DualPrices::zeros(2));
  EXPECT_EQ(count(m.mip, milp::VarType::Binary), 6);
  EXPECT_EQ(m.layout.eta_up.size() + m.layout.eta_down.size(), 4u);
  EXPECT_EQ(m.layout.x_up.size() + m.layout.x_down.size(), 4u);
  EXPECT_EQ(count(m.mip, milp::VarType::Continuous), 8);
}

TEST(PricingModel, StaticHasNoPowerVariables) {
  const Instance inst = two_devices();
  for (Precoder pc : kPrecoders) {
    const auto m = build_pricing(inst, pc, PowerScheme::Static, DualPrices::zeros(2));
    EXPECT_EQ(count(m.mip, milp::VarType::Continuous), 0);
    EXPECT_TRUE(m.layout.eta_up.empty());
    EXPECT_TRUE(m.layout.eta_down.empty());
  }
}

TEST(PricingModel, FairAddsSelectorsAndPhi) {
  const Instance inst = two_devices();
  const auto opt = build_pricing(inst, Precoder::MRC, PowerScheme::Optimal, DualPrices::zeros(2));
  const auto fair = build_pricing(inst, Precoder::MRC, PowerScheme::Fair, DualPrices::zeros(2));
  EXPECT_EQ(fair.layout.z.size(), 2u);
  EXPECT_GE(fair.layout.phi, 0);
  EXPECT_GE(count(fair.mip, milp::VarType::Binary), count(opt.mip, milp::VarType::Binary) + 2);
}

TEST(PricingModel, DeltaFormula) {
  const Instance inst = two_devices();
  const auto m = build_pricing(inst, Precoder::MRC, PowerScheme::Optimal, DualPrices::zeros(2));
  EXPECT_DOUBLE_EQ(m.delta, 1.0 * (2 * 10.0 * 1.0 + 1.0));
  EXPECT_FALSE(m.delta_enlarged);
}

TEST(PricingModel, DeltaEnlargedForStrongDownlink) {
  Instance inst = two_devices();
  inst.params.downlink_snr = 1e4;
  inst.devices[0] = make_device(0, 1.0, 2, 2, 1.0, inst.params);
  inst.devices[1] = make_device(1, 0.5, 1, 3, 1.0, inst.params);
  const auto m = build_pricing(inst, Precoder::MRC, PowerScheme::Optimal, DualPrices::zeros(2));
  EXPECT_TRUE(m.delta_enlarged);
  EXPECT_GT(m.delta, 1.0 * (1 + 1e4 * 1.0));
}

TEST(PricingModel, RejectsNegativeDuals) {
  const Instance inst = two_devices();
  DualPrices d = DualPrices::zeros(2);
  d.up[1] = -0.5;
  EXPECT_THROW(build_pricing(inst, Precoder::MRC, PowerScheme::Fair, d), PreconditionError);
  EXPECT_THROW(price(inst, Precoder::MRC, PowerScheme::Fair, DualPrices::zeros(3)), PreconditionError);
}

TEST(Pricing, ZeroDualsPriceNothing) {
  const Instance inst = two_devices();
  for (Precoder pc : kPrecoders)
    for (PowerScheme s : kSchemes) {
      EXPECT_FALSE(price(inst, pc, s, DualPrices::zeros(2)).has_value());
      PricingOptions o;
      o.engine = PricingEngine::Mip;
      EXPECT_FALSE(price(inst, pc, s, DualPrices::zeros(2), o).has_value());
    }
}

TEST(Pricing, SingleHighDualGivesSingleton) {
  const Instance inst = two_devices();
  DualPrices d = DualPrices::zeros(2);
  d.up[0] = 2.0;
  for (Precoder pc : kPrecoders)
    for (PowerScheme s : kSchemes) {
      auto c = price(inst, pc, s, d);
      ASSERT_TRUE(c.has_value());
      EXPECT_GE(c->price, 2.0);
      EXPECT_EQ(c->cset.tx, std::vector<int>{0});
      EXPECT_TRUE(verify_candidate(inst, pc, s, c->cset).ok);
    }
}

// Both engines against the exhaustive oracle.
TEST(Pricing, EnginesMatchOracle) {
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 12; ++trial) {
    const int K = 2 + trial % 5;
    const int P = 1 + trial % 4;
    const Instance inst = oracle::random_instance(rng, K, P);
    const DualPrices d = oracle::random_duals(rng, K);
    for (Precoder pc : kPrecoders)
      for (PowerScheme s : kSchemes) {
        const auto best = oracle::best_price(inst, pc, s, d.up, d.down);
        const auto c = search_pricing(inst, pc, s, d, -1e300);
        ASSERT_TRUE(c.has_value());
        EXPECT_NEAR(c->price, best.value, 1e-9) << trial << " " << to_string(pc) << " " << to_string(s);
        if (!c->cset.empty()) EXPECT_TRUE(verify_candidate(inst, pc, s, c->cset).ok);

        const auto m = build_pricing(inst, pc, s, d);
        const auto ms = milp::solve_mip(m.mip);
        ASSERT_EQ(ms.status, milp::MipStatus::Optimal);
        EXPECT_NEAR(ms.objective, best.value, 1e-6) << trial << " " << to_string(pc) << " " << to_string(s);
      }
  }
}

TEST(Verify, BudgetAndSinrFailures) {
  Instance inst;
  inst.devices.push_back(make_device(0, 1.0, 1, 1, 1.0, inst.params));
  inst.devices.push_back(make_device(1, 1.0, 1, 1, 1.0, inst.params));
  CompatibleSet c;
  c.rx = {0, 1};
  c.eta_down = {0.75, 0.75};
  auto r = verify_candidate(inst, Precoder::MRC, PowerScheme::Optimal, c);
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.reason, "bs_power");

  // Two equal devices sharing the downlink at half power each: SINR is
  // M rho gamma / 2 / (1 + rho beta) which we push the threshold above.
  const double g = inst.devices[0].gamma;
  const double two_active = 100 * 10 * g * 0.5 / (1 + 10 * 1.0);
  inst.devices[1].sinr_threshold = two_active * 1.01;
  c.eta_down = {0.5, 0.5};
  r = verify_candidate(inst, Precoder::MRC, PowerScheme::Optimal, c);
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.reason, "sinr_down");
  EXPECT_EQ(r.device, 1);
  EXPECT_NEAR(r.margin, 1 / 1.01 - 1, 1e-9);
}

TEST(Pricing, SchemeDominance) {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    const Instance inst = oracle::random_instance(rng, 5, 3);
    const DualPrices d = oracle::random_duals(rng, 5);
    for (Precoder pc : kPrecoders) {
      const double opt = search_pricing(inst, pc, PowerScheme::Optimal, d, -1e300)->price;
      const double fair = search_pricing(inst, pc, PowerScheme::Fair, d, -1e300)->price;
      const double stat = search_pricing(inst, pc, PowerScheme::Static, d, -1e300)->price;
      EXPECT_GE(opt + 1e-12, fair);
      EXPECT_GE(opt + 1e-12, stat);
      EXPECT_GE(fair, 0.0);
    }
  }
}

TEST(Pricing, FairCandidateMatchesClosedForm) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Instance inst = oracle::random_instance(rng, 6, 4);
    const DualPrices d = oracle::random_duals(rng, 6);
    for (Precoder pc : kPrecoders) {
      auto c = search_pricing(inst, pc, PowerScheme::Fair, d, -1e300);
      if (c->cset.empty()) continue;
      const auto up = fair_uplink(inst, c->cset.tx);
      const auto down = fair_downlink(inst, c->cset.rx, pc);
      for (std::size_t i = 0; i < c->cset.tx.size(); ++i)
        EXPECT_NEAR(c->cset.eta_up[i], up[c->cset.tx[i]], 1e-7);
      for (std::size_t i = 0; i < c->cset.rx.size(); ++i)
        EXPECT_NEAR(c->cset.eta_down[i], down[c->cset.rx[i]], 1e-7);
    }
  }
}

TEST(Pricing, SearchMatchesOracleOnManyInstances) {
  std::mt19937 rng(77);
  for (int trial = 0; trial < 150; ++trial) {
    const int K = 3 + trial % 5;
    const int P = 1 + trial % 5;
    const Instance inst = oracle::random_instance(rng, K, P);
    const DualPrices d = oracle::random_duals(rng, K);
    for (Precoder pc : kPrecoders)
      for (PowerScheme s : kSchemes) {
        const auto best = oracle::best_price(inst, pc, s, d.up, d.down);
        const auto c = search_pricing(inst, pc, s, d, -1e300);
        ASSERT_TRUE(c.has_value());
        EXPECT_NEAR(c->price, best.value, 1e-9) << trial << " " << to_string(pc) << " " << to_string(s);
      }
  }
}

TEST(Pricing, SearchMatchesOracleWithIdenticalDevices) {
  std::mt19937 rng(91);
  for (int trial = 0; trial < 100; ++trial) {
    const int K = 4 + trial % 4;
    const int P = 2 + trial % 4;
    const Instance inst = oracle::grouped_instance(rng, K, P, 1 + trial % 3);
    const DualPrices d = oracle::random_duals(rng, K);
    for (Precoder pc : kPrecoders)
      for (PowerScheme s : kSchemes) {
        const auto best = oracle::best_price(inst, pc, s, d.up, d.down);
        const auto c = search_pricing(inst, pc, s, d, -1e300);
        ASSERT_TRUE(c.has_value());
        EXPECT_NEAR(c->price, best.value, 1e-9) << trial << " " << to_string(pc) << " " << to_string(s);
        if (!c->cset.empty()) EXPECT_TRUE(verify_candidate(inst, pc, s, c->cset).ok);
      }
  }
}
