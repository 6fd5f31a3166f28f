// mmimo: minimum-frame scheduling for massive MIMO uplink/downlink traffic.
//
//   mmimo run --experiment 6 --scenario 1 --precoder mrc --power optimal
//   mmimo run --instance devices.json --power static --format csv
//   mmimo sweep --experiment 4 --precoder mrc zf --out exp4.csv
//
// Every flag can also be set through an environment variable named
// MMIMO_<FLAG>, e.g. MMIMO_TIME_LIMIT_S=30.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mmimo/errors.hpp"
#include "mmimo/runner.hpp"
#include "mmimo/scenarios.hpp"

namespace {

using namespace mmimo;

struct Common {
  std::string precoder = "mrc";
  std::string power = "optimal";
  std::string engine = "search";
  double eps_rc = 1e-6;
  int iter_cap = 2000;
  double time_limit_s = 60.0;
  bool early_stop = false;
  std::string out;
  std::string format = "json";
  int verbose = 0;
  bool quiet = false;
};

void add_solver_flags(CLI::App* app, Common& c) {
  app->add_option("--eps-rc", c.eps_rc, "Reduced-cost tolerance of pricing")
      ->envname("MMIMO_EPS_RC")
      ->check(CLI::NonNegativeNumber);
  app->add_option("--iter-cap", c.iter_cap, "Column generation iteration cap")
      ->envname("MMIMO_ITER_CAP")
      ->check(CLI::PositiveNumber);
  app->add_option("--time-limit-s", c.time_limit_s, "Time limit per pricing solve and per frame IP")
      ->envname("MMIMO_TIME_LIMIT_S")
      ->check(CLI::PositiveNumber);
  app->add_flag("--early-stop", c.early_stop, "Stop column generation on a stalled objective")
      ->envname("MMIMO_EARLY_STOP");
  app->add_option("--engine", c.engine, "Pricing engine")
      ->envname("MMIMO_ENGINE")
      ->check(CLI::IsMember({"search", "mip"}));
  app->add_option("--out", c.out, "Output file (stdout when absent)")->envname("MMIMO_OUT");
  app->add_option("--format", c.format, "Output format")
      ->envname("MMIMO_FORMAT")
      ->check(CLI::IsMember({"json", "csv"}));
  app->add_flag("-v,--verbose", c.verbose,
                "Progress on stderr; -v per iteration, -vv per branch-and-bound node")
      ->envname("MMIMO_VERBOSE");
  app->add_flag("-q,--quiet", c.quiet, "No progress output")->envname("MMIMO_QUIET");
}

SolverOptions solver_options(const Common& c) {
  SolverOptions s;
  s.engine = parse_pricing_engine(c.engine);
  s.eps_rc = c.eps_rc;
  s.iter_cap = c.iter_cap;
  s.time_limit_s = c.time_limit_s;
  s.early_stop = c.early_stop;
  return s;
}

Verbosity verbosity(const Common& c) {
  if (c.verbose >= 2) return Verbosity::Node;
  if (c.verbose == 1) return Verbosity::Iteration;
  return Verbosity::Quiet;
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty()) return;
    file_.open(path);
    if (!file_) throw FormatError("cannot open " + path + " for writing");
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

int emit_error(const Common& c, const std::string& kind, int code, const std::string& msg) {
  nlohmann::json j = {{"error", kind}, {"message", msg}, {"exit_code", code}};
  try {
    Output out(c.out);
    out.stream() << j.dump(2) << "\n";
  } catch (const std::exception&) {
    std::cout << j.dump(2) << "\n";
  }
  if (!c.quiet) std::cerr << "error: " << msg << "\n";
  return code;
}

std::optional<double> threshold(const std::optional<double>& mu, const std::optional<double>& mu_db) {
  if (mu_db) return db_to_linear(*mu_db);
  return mu;
}

int cmd_run(const Common& c, std::optional<int> experiment, int scenario_id,
            const std::string& instance, std::optional<double> mu, std::optional<int> devices) {
  RunSpec spec;
  try {
    spec.experiment = experiment;
    spec.scenario = scenario_id;
    if (!instance.empty()) spec.instance_path = instance;
    spec.mu = mu;
    spec.devices = devices;
    spec.precoder = parse_precoder(c.precoder);
    spec.scheme = parse_power_scheme(c.power);
    spec.solver = solver_options(c);
    spec.verbosity = verbosity(c);
    spec.validate();
  } catch (const std::exception& e) {
    ErrorInfo info = classify(e);
    return emit_error(c, info.kind, info.exit_code, e.what());
  }

  RunReport r;
  try {
    r = run(spec, c.quiet ? nullptr : &std::cerr);
  } catch (const std::exception& e) {
    ErrorInfo info = classify(e);
    return emit_error(c, info.kind, info.exit_code, e.what());
  }

  Output out(c.out);
  if (c.format == "csv") {
    write_csv_line(out.stream(), csv_header());
    write_csv_line(out.stream(), csv_row(r));
  } else {
    out.stream() << report_to_json(r).dump(2) << "\n";
  }
  if (r.cg_stop == "pricing_timeout") {
    if (!c.quiet) std::cerr << "error: pricing timed out before the relaxation was proven\n";
    return 4;
  }
  if (!r.validation.ok) {
    if (!c.quiet) std::cerr << "error: schedule failed validation: " << r.validation.reason << "\n";
    return 5;
  }
  return 0;
}

std::vector<RunSpec> sweep_specs(const Common& c, int experiment, std::vector<int> scenarios,
                                 std::vector<std::string> precoders, std::vector<std::string> powers,
                                 std::optional<double> mu) {
  if (precoders.empty()) precoders = {"mrc", "zf"};
  if (powers.empty()) powers = {"optimal", "fair", "static", "downlink"};
  const bool grid = experiment == 4 || experiment == 5;
  if (scenarios.empty()) scenarios = grid ? std::vector<int>{1} : std::vector<int>{1, 2, 3, 4, 5, 6};

  struct Point {
    std::optional<double> mu;
    std::optional<int> devices;
  };
  std::vector<Point> points;
  if (experiment == 4 && !mu) {
    for (double m : experiment4_thresholds()) points.push_back({m, std::nullopt});
  } else if (experiment == 5) {
    for (int k : experiment5_sizes()) points.push_back({mu, k});
  } else {
    points.push_back({mu, std::nullopt});
  }

  std::vector<RunSpec> specs;
  for (int sc : scenarios)
    for (const std::string& p : precoders)
      for (const std::string& s : powers)
        for (const Point& pt : points) {
          RunSpec spec;
          spec.experiment = experiment;
          spec.scenario = sc;
          spec.mu = pt.mu;
          spec.devices = pt.devices;
          spec.precoder = parse_precoder(p);
          spec.scheme = parse_power_scheme(s);
          spec.solver = solver_options(c);
          spec.validate();
          specs.push_back(spec);
        }
  return specs;
}

int cmd_sweep(const Common& c, int experiment, const std::vector<int>& scenarios,
              const std::vector<std::string>& precoders, const std::vector<std::string>& powers,
              std::optional<double> mu, int jobs) {
  std::vector<RunSpec> specs;
  try {
    specs = sweep_specs(c, experiment, scenarios, precoders, powers, mu);
  } catch (const std::exception& e) {
    ErrorInfo info = classify(e);
    return emit_error(c, info.kind, info.exit_code, e.what());
  }

  std::vector<SweepRow> rows = sweep(specs, jobs, c.quiet ? nullptr : &std::cerr);

  Output out(c.out);
  bool all_ok = true;
  if (c.format == "csv") {
    write_csv_line(out.stream(), csv_header());
    for (const SweepRow& row : rows) {
      if (row.report) {
        std::vector<std::string> fields = csv_row(*row.report);
        fields[13] = row.status;
        write_csv_line(out.stream(), fields);
      } else {
        write_csv_line(out.stream(), csv_error_row(row.spec, row.status, row.message));
      }
      all_ok = all_ok && row.status == "ok";
    }
  } else {
    nlohmann::json arr = nlohmann::json::array();
    for (const SweepRow& row : rows) {
      nlohmann::json j = row.report ? report_to_json(*row.report, false)
                                     : nlohmann::json{{"config", spec_to_json(row.spec)}};
      j["status"] = row.status;
      if (!row.message.empty()) j["message"] = row.message;
      arr.push_back(j);
      all_ok = all_ok && row.status == "ok";
    }
    out.stream() << arr.dump(2) << "\n";
  }
  return all_ok ? 0 : 5;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimum-frame scheduling of massive MIMO traffic by column generation"};
  app.require_subcommand(1);

  Common rc;
  std::optional<int> r_experiment;
  int r_scenario = 1;
  std::string r_instance;
  std::optional<double> r_mu, r_mu_db;
  std::optional<int> r_devices;

  CLI::App* run_cmd = app.add_subcommand("run", "Solve one configuration");
  auto* exp_opt = run_cmd->add_option("--experiment", r_experiment, "Experiment 1..6")
                      ->envname("MMIMO_EXPERIMENT")
                      ->check(CLI::Range(1, 6));
  auto* inst_opt = run_cmd->add_option("--instance", r_instance, "Instance JSON file")
                       ->envname("MMIMO_INSTANCE")
                       ->check(CLI::ExistingFile);
  exp_opt->excludes(inst_opt);
  run_cmd->add_option("--scenario", r_scenario, "Demand scenario 1..6")
      ->envname("MMIMO_SCENARIO")
      ->check(CLI::Range(1, 6));
  run_cmd->add_option("--precoder", rc.precoder, "Precoder")
      ->envname("MMIMO_PRECODER")
      ->check(CLI::IsMember({"mrc", "zf"}));
  run_cmd->add_option("--power", rc.power, "Power control scheme")
      ->envname("MMIMO_POWER")
      ->check(CLI::IsMember({"optimal", "fair", "static", "downlink"}));
  auto* mu_opt = run_cmd->add_option("--mu", r_mu, "SINR threshold for every device (linear)")
                     ->envname("MMIMO_MU");
  run_cmd->add_option("--mu-db", r_mu_db, "SINR threshold for every device (dB)")
      ->envname("MMIMO_MU_DB")
      ->excludes(mu_opt);
  run_cmd->add_option("--devices", r_devices, "Device count (experiment 5)")
      ->envname("MMIMO_DEVICES");
  add_solver_flags(run_cmd, rc);

  Common sc;
  int s_experiment = 1;
  std::vector<int> s_scenarios;
  std::vector<std::string> s_precoders, s_powers;
  std::optional<double> s_mu, s_mu_db;
  int s_jobs = 1;
  sc.format = "csv";

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Solve a grid of configurations");
  sweep_cmd->add_option("--experiment", s_experiment, "Experiment 1..6")
      ->envname("MMIMO_EXPERIMENT")
      ->required()
      ->check(CLI::Range(1, 6));
  sweep_cmd->add_option("--scenario", s_scenarios, "Scenarios (all, or 1 for experiments 4 and 5)")
      ->delimiter(',')
      ->check(CLI::Range(1, 6));
  sweep_cmd->add_option("--precoder", s_precoders, "Precoders (both by default)")
      ->delimiter(',')
      ->check(CLI::IsMember({"mrc", "zf"}));
  sweep_cmd->add_option("--power", s_powers, "Power schemes (all by default)")
      ->delimiter(',')
      ->check(CLI::IsMember({"optimal", "fair", "static", "downlink"}));
  auto* smu_opt = sweep_cmd->add_option("--mu", s_mu, "Fixed SINR threshold (linear)")
                      ->envname("MMIMO_MU");
  sweep_cmd->add_option("--mu-db", s_mu_db, "Fixed SINR threshold (dB)")
      ->envname("MMIMO_MU_DB")
      ->excludes(smu_opt);
  sweep_cmd->add_option("--jobs", s_jobs, "Concurrent runs")
      ->envname("MMIMO_JOBS")
      ->check(CLI::PositiveNumber);
  add_solver_flags(sweep_cmd, sc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run_cmd) {
      if (!r_experiment && r_instance.empty())
        return emit_error(rc, "usage", 2, "one of --experiment or --instance is required");
      return cmd_run(rc, r_experiment, r_scenario, r_instance, threshold(r_mu, r_mu_db), r_devices);
    }
    return cmd_sweep(sc, s_experiment, s_scenarios, s_precoders, s_powers,
                     threshold(s_mu, s_mu_db), s_jobs);
  } catch (const std::exception& e) {
    ErrorInfo info = classify(e);
    return emit_error(*run_cmd ? rc : sc, info.kind, info.exit_code, e.what());
  }
}
