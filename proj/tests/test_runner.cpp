#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "mmimo/errors.hpp"
#include "mmimo/instance_io.hpp"
#include "mmimo/runner.hpp"

using namespace mmimo;

namespace {

RunSpec exp4(double mu, Precoder p, PowerScheme s) {
  RunSpec spec;
  spec.experiment = 4;
  spec.scenario = 1;
  spec.mu = mu;
  spec.precoder = p;
  spec.scheme = s;
  return spec;
}

}  // namespace

TEST(RunSpec, ExactlyOneSource) {
  RunSpec s;
  EXPECT_THROW(s.validate(), PreconditionError);
  s.experiment = 1;
  EXPECT_NO_THROW(s.validate());
  s.instance_path = "x.json";
  EXPECT_THROW(s.validate(), PreconditionError);
  s.experiment.reset();
  EXPECT_NO_THROW(s.validate());

  RunSpec d;
  d.experiment = 3;
  d.devices = 8;
  EXPECT_THROW(d.validate(), PreconditionError);
  d.experiment = 5;
  EXPECT_NO_THROW(d.validate());
}

TEST(Run, ReportIsConsistent) {
  const RunReport r = run(exp4(5.0, Precoder::ZF, PowerScheme::Optimal));
  EXPECT_TRUE(r.validation.ok);
  EXPECT_TRUE(r.lr_proven);
  EXPECT_EQ(r.num_devices, 20);
  EXPECT_EQ(r.frame.frame_size, 10);
  EXPECT_GE(r.heuristic.frame_size, r.frame.frame_size);
  EXPECT_GE(r.rounded.frame_size, r.frame.frame_size);
  EXPECT_EQ(r.bounds.lp_bound, 10);

  const auto j = report_to_json(r);
  EXPECT_EQ(j["config"]["experiment"], 4);
  EXPECT_EQ(j["config"]["precoder"], "zf");
  EXPECT_EQ(j["frame"]["frame"], 10);
  EXPECT_TRUE(j["validation"]["ok"].get<bool>());
  EXPECT_FALSE(report_to_json(r, false)["frame"].contains("csets"));
}

TEST(Run, DeterministicApartFromTiming) {
  const RunReport a = run(exp4(10.0, Precoder::MRC, PowerScheme::Fair));
  const RunReport b = run(exp4(10.0, Precoder::MRC, PowerScheme::Fair));
  auto strip = [](nlohmann::json j) {
    j.erase("seconds");
    j["relaxation"].erase("t_master");
    j["relaxation"].erase("t_pricing");
    j["frame"].erase("seconds");
    j["heuristic"].erase("seconds");
    return j.dump();
  };
  EXPECT_EQ(strip(report_to_json(a)), strip(report_to_json(b)));
}

TEST(Run, InstanceFileWithOneDevice) {
  Instance inst;
  inst.devices.push_back(make_device(0, 0.5, 4, 9, 1.0, inst.params));
  const auto path = std::filesystem::temp_directory_path() / "mmimo_runner_one.json";
  save_instance(inst, path);
  RunSpec spec;
  spec.instance_path = path;
  spec.scheme = PowerScheme::Static;
  const RunReport r = run(spec);
  EXPECT_EQ(r.frame.frame_size, 9);
  EXPECT_TRUE(r.validation.ok);
  std::filesystem::remove(path);
}

TEST(Csv, HeaderOrderAndQuoting) {
  const auto& h = csv_header();
  const std::vector<std::string> lead{"experiment", "scenario", "precoder", "scheme", "frame",
                                      "lr_obj", "total_power", "max_node_power", "iters",
                                      "pool_size", "t_master", "t_pricing", "t_ip", "status"};
  ASSERT_GE(h.size(), lead.size());
  for (std::size_t i = 0; i < lead.size(); ++i) EXPECT_EQ(h[i], lead[i]);

  std::ostringstream os;
  write_csv_line(os, {"a", "b,c", "d\"e"});
  EXPECT_EQ(os.str(), "a,\"b,c\",\"d\"\"e\"\n");

  RunSpec s;
  s.experiment = 2;
  s.scenario = 3;
  const auto row = csv_error_row(s, "timeout", "boom");
  ASSERT_EQ(row.size(), h.size());
  EXPECT_EQ(row[0], "2");
  EXPECT_EQ(row[13], "timeout");
  EXPECT_EQ(row.back(), "boom");
}

TEST(Sweep, FailuresBecomeRows) {
  std::vector<RunSpec> specs;
  specs.push_back(exp4(1.0, Precoder::ZF, PowerScheme::Static));
  RunSpec bad = exp4(1.0, Precoder::ZF, PowerScheme::Static);
  bad.mu = 1e9;
  specs.push_back(bad);
  const auto rows = sweep(specs, 2);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].status, "ok");
  ASSERT_TRUE(rows[0].report.has_value());
  EXPECT_EQ(rows[0].report->frame.frame_size, 30);
  EXPECT_EQ(rows[1].status, "instance_infeasible");
  EXPECT_FALSE(rows[1].report.has_value());
}

TEST(Errors, ExitCodes) {
  EXPECT_EQ(classify(InstanceInfeasibleError(0, "x")).exit_code, 3);
  EXPECT_EQ(classify(PricingInconclusiveError("x")).exit_code, 4);
  EXPECT_EQ(classify(FormatError("x")).exit_code, 2);
  EXPECT_EQ(classify(std::runtime_error("x")).exit_code, 1);
}
