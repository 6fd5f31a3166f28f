#include "mmimo/colgen.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "mmimo/errors.hpp"
#include "mmimo/milp/lp.hpp"
#include "mmimo/milp/mip.hpp"

namespace mmimo {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Covering rows: (device, direction) pairs with positive demand.
struct Rows {
  std::vector<int> up;    // row index per device or -1
  std::vector<int> down;  // row index per device or -1
  std::vector<double> rhs;
};

Rows covering_rows(const Instance& inst) {
  Rows r;
  const auto K = static_cast<std::size_t>(inst.size());
  r.up.assign(K, -1);
  r.down.assign(K, -1);
  for (std::size_t k = 0; k < K; ++k) {
    if (inst.devices[k].up_demand > 0) {
      r.up[k] = static_cast<int>(r.rhs.size());
      r.rhs.push_back(inst.devices[k].up_demand);
    }
  }
  for (std::size_t k = 0; k < K; ++k) {
    if (inst.devices[k].down_demand > 0) {
      r.down[k] = static_cast<int>(r.rhs.size());
      r.rhs.push_back(inst.devices[k].down_demand);
    }
  }
  return r;
}

// Appends one variable per set and the covering rows to lp.
template <class AddVar>
void build_frame(const Instance& inst, const std::vector<const CompatibleSet*>& sets,
                 milp::LinearProgram& lp, AddVar add_var, const Rows& rows) {
  std::vector<std::vector<std::pair<int, double>>> coef(rows.rhs.size());
  for (std::size_t c = 0; c < sets.size(); ++c) {
    int cap = 0;
    for (int k : sets[c]->tx) cap = std::max(cap, inst.device(k).up_demand);
    for (int k : sets[c]->rx) cap = std::max(cap, inst.device(k).down_demand);
    const int j = add_var(static_cast<double>(cap));
    for (int k : sets[c]->tx)
      if (rows.up[static_cast<std::size_t>(k)] >= 0)
        coef[static_cast<std::size_t>(rows.up[static_cast<std::size_t>(k)])].emplace_back(j, 1.0);
    for (int k : sets[c]->rx)
      if (rows.down[static_cast<std::size_t>(k)] >= 0)
        coef[static_cast<std::size_t>(rows.down[static_cast<std::size_t>(k)])].emplace_back(j, 1.0);
  }
  for (std::size_t i = 0; i < coef.size(); ++i)
    lp.add_constraint(std::move(coef[i]), milp::Sense::Ge, rows.rhs[i]);
}

Schedule make_schedule(const std::vector<const CompatibleSet*>& sets,
                       const std::vector<double>& t) {
  Schedule s;
  for (std::size_t c = 0; c < sets.size(); ++c) {
    const int b = static_cast<int>(std::llround(t[c]));
    if (b <= 0) continue;
    s.entries.push_back(ScheduleEntry{*sets[c], b});
    s.frame_size += b;
  }
  return s;
}

Schedule frame_ip(const Instance& inst, const std::vector<const CompatibleSet*>& sets,
                  const std::vector<double>& start, const FrameIpOptions& opts) {
  const Rows rows = covering_rows(inst);
  milp::MipProblem p;
  build_frame(inst, sets, p.lp,
              [&](double cap) { return p.add_var(0.0, cap, 1.0, milp::VarType::Integer); }, rows);
  milp::MipOptions mo;
  mo.time_limit_s = opts.time_limit_s;
  mo.initial_solution = start;
  mo.on_node = opts.on_node;
  const milp::MipSolution sol = milp::solve_mip(p, mo);
  if (!sol.has_solution())
    throw Error(std::string("frame problem failed: ") + milp::to_string(sol.status));
  Schedule s = make_schedule(sets, sol.x);
  s.status = sol.status == milp::MipStatus::Optimal ? "optimal" : "timeout";
  s.bound = sol.bound;
  s.gap = sol.gap;
  s.seconds = sol.seconds;
  s.nodes = sol.nodes;
  s.pool_size = static_cast<int>(sets.size());
  return s;
}

std::vector<double> rounded(const std::vector<double>& t) {
  std::vector<double> r(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) r[i] = std::max(0.0, std::ceil(t[i] - 1e-9));
  return r;
}

void fmt(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9f,", v);
  out += buf;
}

}  // namespace

std::string ColumnPool::key(const CompatibleSet& c) {
  std::string k = "t";
  for (int d : c.tx) k += std::to_string(d) + ",";
  k += "r";
  for (int d : c.rx) k += std::to_string(d) + ",";
  k += "u";
  for (double e : c.eta_up) fmt(k, e);
  k += "d";
  for (double e : c.eta_down) fmt(k, e);
  return k;
}

bool ColumnPool::add(CompatibleSet c) {
  if (!keys_.insert(key(c)).second) return false;
  sets_.push_back(std::move(c));
  return true;
}

bool ColumnPool::contains(const CompatibleSet& c) const { return keys_.count(key(c)) > 0; }

ColumnPool initial_pool(const Instance& inst, Precoder precoder, PowerScheme scheme) {
  ColumnPool pool;
  for (const Device& d : inst.devices) {
    std::vector<int> tx, rx;
    if (d.up_demand > 0) tx.push_back(d.id);
    if (d.down_demand > 0) rx.push_back(d.id);
    if (tx.empty() && rx.empty()) continue;
    auto pw = scheme_powers(inst, precoder, scheme, tx, rx);
    if (!pw) {
      throw InstanceInfeasibleError(
          d.id, "device " + std::to_string(d.id) + " cannot meet its SINR threshold even alone");
    }
    pool.add(make_cset(tx, rx, *pw));
  }
  return pool;
}

int MasterSolution::nonzeros(double tol) const {
  return static_cast<int>(std::count_if(t.begin(), t.end(), [&](double v) { return v > tol; }));
}

MasterSolution solve_master(const Instance& inst, const ColumnPool& pool) {
  const Rows rows = covering_rows(inst);
  std::vector<const CompatibleSet*> sets;
  for (const auto& c : pool.sets()) sets.push_back(&c);
  milp::LinearProgram lp;
  build_frame(inst, sets, lp, [&](double) { return lp.add_var(0.0, milp::kInf, 1.0); }, rows);
  const milp::LpSolution sol = milp::solve_lp(lp);
  if (sol.status != milp::LpStatus::Optimal)
    throw Error(std::string("master problem: ") + milp::to_string(sol.status));
  MasterSolution m;
  m.t = sol.x;
  for (double& v : m.t) v = std::max(0.0, v);
  m.objective = sol.objective;
  m.iterations = static_cast<int>(sol.iterations);
  m.duals = DualPrices::zeros(inst.size());
  for (int k = 0; k < inst.size(); ++k) {
    const auto u = static_cast<std::size_t>(k);
    if (rows.up[u] >= 0) m.duals.up[u] = std::max(0.0, sol.duals[static_cast<std::size_t>(rows.up[u])]);
    if (rows.down[u] >= 0)
      m.duals.down[u] = std::max(0.0, sol.duals[static_cast<std::size_t>(rows.down[u])]);
  }
  return m;
}

CgResult run_cg(const Instance& inst, Precoder precoder, PowerScheme scheme,
                const CgOptions& opts) {
  CgResult res;
  res.pool = opts.initial ? *opts.initial : initial_pool(inst, precoder, scheme);
  std::vector<double> history;
  for (int it = 1;; ++it) {
    CgIteration rec;
    rec.iteration = it;
    auto t0 = Clock::now();
    res.master = solve_master(inst, res.pool);
    rec.master_s = since(t0);
    res.master_s += rec.master_s;
    rec.objective = res.master.objective;
    history.push_back(rec.objective);

    auto finish = [&](const char* why, bool proven) {
      rec.pool_size = res.pool.size();
      res.log.push_back(rec);
      if (opts.on_iteration) opts.on_iteration(rec);
      res.stop_reason = why;
      res.proven = proven;
    };

    if (it > opts.iter_cap) {
      finish("iter_cap", false);
      break;
    }
    if (opts.early_stop && history.size() > 10 &&
        history[history.size() - 11] - history.back() < 1e-3) {
      finish("early_stop", false);
      break;
    }

    t0 = Clock::now();
    std::optional<Candidate> cand;
    try {
      cand = price(inst, precoder, scheme, res.master.duals, opts.pricing);
    } catch (const PricingInconclusiveError&) {
      rec.pricing_s = since(t0);
      res.pricing_s += rec.pricing_s;
      rec.pricing_status = "timeout";
      finish("pricing_timeout", false);
      break;
    }
    rec.pricing_s = since(t0);
    res.pricing_s += rec.pricing_s;
    if (!cand) {
      rec.pricing_status = "none";
      finish("converged", true);
      break;
    }
    rec.price = cand->price;
    rec.pricing_status = cand->status;
    if (!res.pool.add(std::move(cand->cset))) {
      std::fprintf(stderr, "warning: pricing returned a pooled set, stopping\n");
      finish("stall", false);
      break;
    }
    rec.pool_size = res.pool.size();
    res.log.push_back(rec);
    if (opts.on_iteration) opts.on_iteration(rec);
  }
  return res;
}

Schedule round_up(const ColumnPool& pool, const MasterSolution& master) {
  std::vector<const CompatibleSet*> sets;
  for (const auto& c : pool.sets()) sets.push_back(&c);
  Schedule s = make_schedule(sets, rounded(master.t));
  s.status = "rounding";
  s.bound = master.objective;
  s.gap = s.frame_size - master.objective;
  s.pool_size = pool.size();
  return s;
}

Schedule solve_frame_ip(const Instance& inst, const ColumnPool& pool, const MasterSolution& master,
                        const FrameIpOptions& opts) {
  std::vector<const CompatibleSet*> sets;
  for (const auto& c : pool.sets()) sets.push_back(&c);
  return frame_ip(inst, sets, rounded(master.t), opts);
}

Schedule heuristic_frame_ip(const Instance& inst, const ColumnPool& pool,
                            const MasterSolution& master, const FrameIpOptions& opts) {
  std::vector<const CompatibleSet*> sets;
  std::vector<double> t;
  for (int c = 0; c < pool.size(); ++c) {
    if (master.t[static_cast<std::size_t>(c)] > 1e-9) {
      sets.push_back(&pool[c]);
      t.push_back(master.t[static_cast<std::size_t>(c)]);
    }
  }
  return frame_ip(inst, sets, rounded(t), opts);
}

Bounds lower_bounds(const Instance& inst, std::optional<double> lr_objective) {
  long long total = 0;
  for (const Device& d : inst.devices) total += std::max(d.up_demand, d.down_demand);
  const long long P = inst.params.num_pilots;
  Bounds b;
  b.pigeonhole = static_cast<int>((total + P - 1) / P);
  if (lr_objective) b.lp_bound = static_cast<int>(std::ceil(*lr_objective - 1e-6));
  return b;
}

ScheduleMetrics schedule_metrics(const Schedule& s) {
  ScheduleMetrics m;
  std::vector<double> node;
  for (const ScheduleEntry& e : s.entries) {
    for (std::size_t i = 0; i < e.cset.tx.size(); ++i) {
      const auto k = static_cast<std::size_t>(e.cset.tx[i]);
      if (node.size() <= k) node.resize(k + 1, 0.0);
      node[k] += e.blocks * e.cset.eta_up[i];
      m.total_power += e.blocks * e.cset.eta_up[i];
    }
    for (std::size_t i = 0; i < e.cset.rx.size(); ++i) {
      const auto k = static_cast<std::size_t>(e.cset.rx[i]);
      if (node.size() <= k) node.resize(k + 1, 0.0);
      node[k] += e.blocks * e.cset.eta_down[i];
      m.total_power += e.blocks * e.cset.eta_down[i];
    }
  }
  for (double v : node) m.max_node_power = std::max(m.max_node_power, v);
  return m;
}

ScheduleReport validate_schedule(const Instance& inst, Precoder precoder, PowerScheme scheme,
                                 const Schedule& s) {
  ScheduleReport r;
  r.metrics = schedule_metrics(s);
  const auto K = static_cast<std::size_t>(inst.size());
  std::vector<long long> up(K, 0), down(K, 0);
  long long frame = 0;
  for (std::size_t e = 0; e < s.entries.size(); ++e) {
    const ScheduleEntry& en = s.entries[e];
    if (en.blocks < 0) {
      r.ok = false;
      r.reason = "negative_blocks";
      r.entry = static_cast<int>(e);
      return r;
    }
    if (en.blocks == 0) continue;
    frame += en.blocks;
    const VerifyReport v = verify_candidate(inst, precoder, scheme, en.cset);
    if (!v.ok) {
      r.ok = false;
      r.reason = v.reason;
      r.device = v.device;
      r.entry = static_cast<int>(e);
      return r;
    }
    for (int k : en.cset.tx) up[static_cast<std::size_t>(k)] += en.blocks;
    for (int k : en.cset.rx) down[static_cast<std::size_t>(k)] += en.blocks;
  }
  for (std::size_t k = 0; k < K; ++k) {
    if (up[k] < inst.devices[k].up_demand) {
      r.ok = false;
      r.reason = "covering_up";
      r.device = static_cast<int>(k);
      return r;
    }
    if (down[k] < inst.devices[k].down_demand) {
      r.ok = false;
      r.reason = "covering_down";
      r.device = static_cast<int>(k);
      return r;
    }
  }
  if (frame != s.frame_size) {
    r.ok = false;
    r.reason = "frame_size";
  }
  return r;
}

nlohmann::json schedule_to_json(const Schedule& s) {
  nlohmann::json sets = nlohmann::json::array();
  for (const ScheduleEntry& e : s.entries) {
    sets.push_back({{"tx", e.cset.tx},
                    {"rx", e.cset.rx},
                    {"eta_up", e.cset.eta_up},
                    {"eta_down", e.cset.eta_down},
                    {"blocks", e.blocks}});
  }
  const ScheduleMetrics m = schedule_metrics(s);
  return {{"csets", sets},
          {"frame", s.frame_size},
          {"status", s.status},
          {"bound", s.bound},
          {"gap", s.gap},
          {"pool_size", s.pool_size},
          {"nodes", s.nodes},
          {"seconds", s.seconds},
          {"metrics", {{"total_power", m.total_power}, {"max_node_power", m.max_node_power}}}};
}

}  // namespace mmimo
