#include "mmimo/runner.hpp"

#include <cstdio>
#include <mutex>
#include <ostream>

#include "mmimo/errors.hpp"
#include "mmimo/instance_io.hpp"
#include "mmimo/scenarios.hpp"

namespace mmimo {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string label(const RunSpec& s) {
  std::string out;
  if (s.experiment)
    out = "E" + std::to_string(*s.experiment) + "S" + std::to_string(s.scenario);
  else
    out = s.instance_path->string();
  out += " ";
  out += to_string(s.precoder);
  out += "/";
  out += to_string(s.scheme);
  return out;
}

}  // namespace

void RunSpec::validate() const {
  if (experiment.has_value() == instance_path.has_value())
    throw PreconditionError("exactly one of experiment or instance file must be given");
  if (experiment && (*experiment < 1 || *experiment > 6))
    throw PreconditionError("experiment must be in 1..6");
  if (experiment && (scenario < 1 || scenario > 6))
    throw PreconditionError("scenario must be in 1..6");
  if (devices && (!experiment || *experiment != 5))
    throw PreconditionError("a device count applies to experiment 5 only");
  if (mu && !(*mu > 0.0)) throw PreconditionError("threshold must be positive");
  if (solver.iter_cap < 1) throw PreconditionError("iteration cap must be positive");
  if (!(solver.time_limit_s > 0.0)) throw PreconditionError("time limit must be positive");
  if (!(solver.eps_rc >= 0.0)) throw PreconditionError("eps_rc must be non-negative");
}

nlohmann::json spec_to_json(const RunSpec& s) {
  nlohmann::json j;
  if (s.experiment) {
    j["experiment"] = *s.experiment;
    j["scenario"] = s.scenario;
  } else {
    j["instance"] = s.instance_path->string();
  }
  if (s.mu) j["mu"] = *s.mu;
  if (s.devices) j["devices"] = *s.devices;
  j["precoder"] = to_string(s.precoder);
  j["power"] = to_string(s.scheme);
  j["engine"] = to_string(s.solver.engine);
  j["eps_rc"] = s.solver.eps_rc;
  j["iter_cap"] = s.solver.iter_cap;
  j["time_limit_s"] = s.solver.time_limit_s;
  j["early_stop"] = s.solver.early_stop;
  return j;
}

Instance make_instance(const RunSpec& spec) {
  spec.validate();
  Instance inst;
  if (spec.experiment) {
    ExperimentConfig cfg = spec.devices ? experiment5(*spec.devices) : experiment(*spec.experiment);
    if (spec.mu) cfg.mu = *spec.mu;
    inst = build_instance(cfg, scenario(spec.scenario));
  } else {
    inst = load_instance(*spec.instance_path);
    if (spec.mu)
      for (Device& d : inst.devices) d.sinr_threshold = *spec.mu;
  }
  inst.validate();
  return inst;
}

RunReport run(const RunSpec& spec, std::ostream* log) {
  const Instance inst = make_instance(spec);
  RunReport r;
  r.spec = spec;
  r.num_devices = inst.size();

  CgOptions cg;
  cg.pricing.engine = spec.solver.engine;
  cg.pricing.eps_rc = spec.solver.eps_rc;
  cg.pricing.time_limit_s = spec.solver.time_limit_s;
  cg.iter_cap = spec.solver.iter_cap;
  cg.early_stop = spec.solver.early_stop;
  if (log && spec.verbosity != Verbosity::Quiet) {
    cg.on_iteration = [log](const CgIteration& it) {
      *log << "cg " << it.iteration << " obj " << fmt(it.objective) << " price " << fmt(it.price)
           << " pool " << it.pool_size << " pricing " << it.pricing_status << "\n";
    };
  }
  const CgResult res = run_cg(inst, spec.precoder, spec.scheme, cg);
  r.lr_objective = res.master.objective;
  r.lr_proven = res.proven;
  r.cg_stop = res.stop_reason;
  r.iterations = static_cast<int>(res.log.size());
  r.pool_size = res.pool.size();
  r.t_master = res.master_s;
  r.t_pricing = res.pricing_s;
  r.log = res.log;
  r.master_nonzeros = res.master.nonzeros();
  r.rounded = round_up(res.pool, res.master);
  if (log)
    *log << label(spec) << ": relaxation " << fmt(r.lr_objective) << " after " << r.iterations
         << " iterations (" << r.cg_stop << ")\n";

  FrameIpOptions ip;
  ip.time_limit_s = spec.solver.time_limit_s;
  if (log && spec.verbosity == Verbosity::Node) {
    ip.on_node = [log](const milp::NodeEvent& e) {
      *log << "node " << e.node << " depth " << e.depth << " lp " << fmt(e.lp_objective)
           << " incumbent " << fmt(e.incumbent) << " open " << e.open << "\n";
    };
  }
  r.frame = solve_frame_ip(inst, res.pool, res.master, ip);
  r.t_ip = r.frame.seconds;
  r.heuristic = heuristic_frame_ip(inst, res.pool, res.master, ip);
  r.t_heuristic = r.heuristic.seconds;
  r.bounds = lower_bounds(inst, r.lr_objective);
  r.validation = validate_schedule(inst, spec.precoder, spec.scheme, r.frame);
  for (auto [name, s] : {std::pair{"heuristic", &r.heuristic}, std::pair{"rounded", &r.rounded}}) {
    if (!r.validation.ok) break;
    ScheduleReport h = validate_schedule(inst, spec.precoder, spec.scheme, *s);
    if (!h.ok) {
      r.validation = h;
      r.validation.reason = std::string(name) + ": " + h.reason;
    }
  }
  if (log)
    *log << label(spec) << ": frame " << r.frame.frame_size << " (" << r.frame.status
         << "), heuristic " << r.heuristic.frame_size << ", valid " << r.validation.ok << "\n";
  return r;
}

nlohmann::json report_to_json(const RunReport& r, bool with_schedules) {
  nlohmann::json j;
  j["config"] = spec_to_json(r.spec);
  j["devices"] = r.num_devices;
  j["relaxation"] = {{"objective", r.lr_objective},
                     {"proven", r.lr_proven},
                     {"stop", r.cg_stop},
                     {"iterations", r.iterations},
                     {"pool_size", r.pool_size},
                     {"t_master", r.t_master},
                     {"t_pricing", r.t_pricing}};
  nlohmann::json f = schedule_to_json(r.frame);
  nlohmann::json h = schedule_to_json(r.heuristic);
  if (!with_schedules) {
    f.erase("csets");
    h.erase("csets");
  }
  j["frame"] = f;
  j["heuristic"] = h;
  j["rounded_frame"] = r.rounded.frame_size;
  j["master_nonzeros"] = r.master_nonzeros;
  j["bounds"] = {{"pigeonhole", r.bounds.pigeonhole}, {"lp_bound", r.bounds.lp_bound}};
  nlohmann::json v = {{"ok", r.validation.ok}};
  if (!r.validation.ok) {
    v["reason"] = r.validation.reason;
    v["device"] = r.validation.device;
    v["entry"] = r.validation.entry;
  }
  j["validation"] = v;
  j["seconds"] = {{"master", r.t_master},
                  {"pricing", r.t_pricing},
                  {"ip", r.t_ip},
                  {"heuristic", r.t_heuristic}};
  return j;
}

const std::vector<std::string>& csv_header() {
  static const std::vector<std::string> h{
      "experiment", "scenario",  "precoder",        "scheme",         "frame",
      "lr_obj",     "total_power", "max_node_power", "iters",          "pool_size",
      "t_master",   "t_pricing", "t_ip",            "status",         "ip_status",
      "heuristic_frame", "heuristic_pool", "lp_bound", "pigeonhole", "mu",
      "devices",    "t_heuristic", "message"};
  return h;
}

namespace {

std::vector<std::string> leading(const RunSpec& s) {
  return {s.experiment ? std::to_string(*s.experiment) : s.instance_path->string(),
          s.experiment ? std::to_string(s.scenario) : "",
          std::string(to_string(s.precoder)), std::string(to_string(s.scheme))};
}

}  // namespace

std::vector<std::string> csv_row(const RunReport& r) {
  std::vector<std::string> row = leading(r.spec);
  const ScheduleMetrics m = schedule_metrics(r.frame);
  row.insert(row.end(),
             {std::to_string(r.frame.frame_size), fmt(r.lr_objective), fmt(m.total_power),
              fmt(m.max_node_power), std::to_string(r.iterations), std::to_string(r.pool_size),
              fmt(r.t_master), fmt(r.t_pricing), fmt(r.t_ip),
              r.validation.ok ? "ok" : "invalid", r.frame.status,
              std::to_string(r.heuristic.frame_size), std::to_string(r.heuristic.pool_size),
              std::to_string(r.bounds.lp_bound), std::to_string(r.bounds.pigeonhole),
              r.spec.mu ? fmt(*r.spec.mu) : "", std::to_string(r.num_devices),
              fmt(r.t_heuristic), r.validation.ok ? "" : r.validation.reason});
  return row;
}

std::vector<std::string> csv_error_row(const RunSpec& spec, const std::string& status,
                                       const std::string& message) {
  std::vector<std::string> row = leading(spec);
  row.resize(csv_header().size());
  row[13] = status;
  row[19] = spec.mu ? fmt(*spec.mu) : "";
  row.back() = message;
  return row;
}

void write_csv_line(std::ostream& os, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) os << ',';
    const std::string& f = fields[i];
    if (f.find_first_of(",\"\n") == std::string::npos) {
      os << f;
      continue;
    }
    os << '"';
    for (char c : f) {
      if (c == '"') os << '"';
      os << c;
    }
    os << '"';
  }
  os << '\n';
}

ErrorInfo classify(const std::exception& e) {
  if (dynamic_cast<const InstanceInfeasibleError*>(&e)) return {3, "instance_infeasible"};
  if (dynamic_cast<const PricingInconclusiveError*>(&e)) return {4, "timeout"};
  if (dynamic_cast<const FormatError*>(&e)) return {2, "format"};
  if (dynamic_cast<const PreconditionError*>(&e)) return {2, "precondition"};
  if (dynamic_cast<const DomainError*>(&e)) return {2, "domain"};
  if (dynamic_cast<const ModelError*>(&e)) return {2, "model"};
  return {1, "error"};
}

std::vector<SweepRow> sweep(const std::vector<RunSpec>& specs, int jobs, std::ostream* log) {
  std::vector<SweepRow> rows(specs.size());
  std::mutex log_mu;
  auto one = [&](std::size_t i) {
    SweepRow& row = rows[i];
    row.spec = specs[i];
    try {
      RunSpec quiet = specs[i];
      quiet.verbosity = Verbosity::Quiet;
      row.report = run(quiet, nullptr);
      row.status = row.report->validation.ok ? "ok" : "invalid";
      if (row.report->cg_stop == "pricing_timeout") row.status = "timeout";
    } catch (const std::exception& e) {
      row.status = classify(e).kind;
      row.message = e.what();
    }
    if (log) {
      std::lock_guard<std::mutex> lock(log_mu);
      *log << label(row.spec) << ": " << row.status;
      if (row.report) *log << ", frame " << row.report->frame.frame_size;
      *log << "\n";
    }
  };
  const long n = static_cast<long>(specs.size());
#pragma omp parallel for schedule(dynamic) num_threads(jobs > 0 ? jobs : 1) if (jobs > 1)
  for (long i = 0; i < n; ++i) one(static_cast<std::size_t>(i));
  return rows;
}

}  // namespace mmimo
