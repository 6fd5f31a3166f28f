#pragma once

// End-to-end runs: instance -> column generation -> frame IP over all
// generated sets -> frame IP over the sets used by the final master ->
// validation. Shared by the command-line tool and the acceptance suite.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mmimo/colgen.hpp"
#include "mmimo/model.hpp"
#include "mmimo/power.hpp"
#include "mmimo/pricing.hpp"

namespace mmimo {

struct SolverOptions {
  PricingEngine engine = PricingEngine::Search;
  double eps_rc = 1e-6;
  int iter_cap = 2000;
  double time_limit_s = 60.0;  // per pricing solve and per frame IP
  bool early_stop = false;
};

enum class Verbosity { Quiet, Iteration, Node };

struct RunSpec {
  std::optional<int> experiment;
  int scenario = 1;
  std::optional<std::filesystem::path> instance_path;
  /// Overrides every device threshold (linear).
  std::optional<double> mu;
  /// Device count for experiment 5.
  std::optional<int> devices;

  Precoder precoder = Precoder::MRC;
  PowerScheme scheme = PowerScheme::Optimal;
  SolverOptions solver;
  Verbosity verbosity = Verbosity::Quiet;

  /// Throws PreconditionError unless exactly one instance source is set.
  void validate() const;
};

nlohmann::json spec_to_json(const RunSpec& spec);

Instance make_instance(const RunSpec& spec);

struct RunReport {
  RunSpec spec;
  int num_devices = 0;

  double lr_objective = 0.0;
  bool lr_proven = false;
  std::string cg_stop;
  int iterations = 0;
  int pool_size = 0;

  int master_nonzeros = 0;

  Schedule rounded;    // every t rounded up
  Schedule frame;      // over every generated set
  Schedule heuristic;  // over the sets with positive t in the final master
  Bounds bounds;
  ScheduleReport validation;

  double t_master = 0.0;
  double t_pricing = 0.0;
  double t_ip = 0.0;
  double t_heuristic = 0.0;

  std::vector<CgIteration> log;
};

/// Progress lines go to log when it is non-null. Errors propagate.
RunReport run(const RunSpec& spec, std::ostream* log = nullptr);

nlohmann::json report_to_json(const RunReport& r, bool with_schedules = true);

/// Fixed leading columns, then status and extras.
const std::vector<std::string>& csv_header();
std::vector<std::string> csv_row(const RunReport& r);
/// Row of a run that failed before producing a report.
std::vector<std::string> csv_error_row(const RunSpec& spec, const std::string& status,
                                       const std::string& message);
void write_csv_line(std::ostream& os, const std::vector<std::string>& fields);

struct SweepRow {
  RunSpec spec;
  std::optional<RunReport> report;
  std::string status;  // ok, or an error kind
  std::string message;
};

/// Runs every spec; failures become rows. jobs > 1 runs specs concurrently.
std::vector<SweepRow> sweep(const std::vector<RunSpec>& specs, int jobs = 1,
                            std::ostream* log = nullptr);

/// Exit code and error kind for an exception escaping run().
struct ErrorInfo {
  int exit_code = 1;
  std::string kind;
};
ErrorInfo classify(const std::exception& e);

}  // namespace mmimo
