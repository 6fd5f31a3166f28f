#include "mmimo/milp/mps.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <vector>

namespace mmimo::milp {

namespace {

std::string row_name(int i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "R%07d", i + 1);
  return buf;
}

std::string col_name(int j) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "C%07d", j + 1);
  return buf;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  std::string s = buf;
  if (s.size() > 12) {
    std::snprintf(buf, sizeof buf, "%.6e", v);
    s = buf;
  }
  return s;
}

// Fixed fields: 2-3 type, 5-12 name, 15-22 name, 25-36 value, 40-47 name, 50-61 value.
void line(std::ostream& os, const std::string& type, const std::string& n1, const std::string& n2 = {},
          const std::string& v1 = {}) {
  char buf[96];
  if (n2.empty()) {
    std::snprintf(buf, sizeof buf, " %-2s %-8s", type.c_str(), n1.c_str());
  } else {
    std::snprintf(buf, sizeof buf, " %-2s %-8s  %-8s  %12s", type.c_str(), n1.c_str(), n2.c_str(),
                  v1.c_str());
  }
  std::string s = buf;
  while (!s.empty() && s.back() == ' ') s.pop_back();
  os << s << '\n';
}

}  // namespace

void write_mps(std::ostream& os, const MipProblem& p, const std::string& name) {
  const LinearProgram& lp = p.lp;
  const int n = lp.num_vars();
  const int m = lp.num_constraints();
  os << "NAME          " << name << '\n';
  for (int j = 0; j < n; ++j)
    if (!lp.vars[static_cast<std::size_t>(j)].name.empty())
      os << "* " << col_name(j) << ' ' << lp.vars[static_cast<std::size_t>(j)].name << '\n';
  for (int i = 0; i < m; ++i)
    if (!lp.cons[static_cast<std::size_t>(i)].name.empty())
      os << "* " << row_name(i) << ' ' << lp.cons[static_cast<std::size_t>(i)].name << '\n';
  if (lp.sense == ObjSense::Max) os << "OBJSENSE\n    MAX\n";
  os << "ROWS\n";
  line(os, "N", "COST");
  for (int i = 0; i < m; ++i) {
    const Sense s = lp.cons[static_cast<std::size_t>(i)].sense;
    line(os, s == Sense::Le ? "L" : s == Sense::Ge ? "G" : "E", row_name(i));
  }

  std::vector<std::vector<std::pair<int, double>>> cols(static_cast<std::size_t>(n));
  for (int i = 0; i < m; ++i)
    for (const auto& [j, a] : lp.cons[static_cast<std::size_t>(i)].row)
      cols[static_cast<std::size_t>(j)].emplace_back(i, a);

  os << "COLUMNS\n";
  bool in_int = false;
  int marker = 0;
  for (int j = 0; j < n; ++j) {
    const bool integer = !p.types.empty() && p.is_integer(j);
    if (integer != in_int) {
      char buf[16];
      std::snprintf(buf, sizeof buf, "MARKER%02d", marker++ % 100);
      os << "    " << buf << "                 'MARKER'                 "
         << (integer ? "'INTORG'" : "'INTEND'") << '\n';
      in_int = integer;
    }
    const std::string cn = col_name(j);
    const double c = lp.vars[static_cast<std::size_t>(j)].obj;
    if (c != 0.0 || cols[static_cast<std::size_t>(j)].empty()) line(os, "", cn, "COST", num(c));
    for (const auto& [i, a] : cols[static_cast<std::size_t>(j)]) line(os, "", cn, row_name(i), num(a));
  }
  if (in_int) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "MARKER%02d", marker % 100);
    os << "    " << buf << "                 'MARKER'                 'INTEND'\n";
  }

  os << "RHS\n";
  for (int i = 0; i < m; ++i) {
    const double r = lp.cons[static_cast<std::size_t>(i)].rhs;
    if (r != 0.0) line(os, "", "RHS", row_name(i), num(r));
  }

  os << "BOUNDS\n";
  for (int j = 0; j < n; ++j) {
    const Variable& v = lp.vars[static_cast<std::size_t>(j)];
    const std::string cn = col_name(j);
    const bool binary = !p.types.empty() && p.types[static_cast<std::size_t>(j)] == VarType::Binary;
    if (binary && v.lb == 0.0 && v.ub == 1.0) {
      line(os, "BV", "BND", cn, "");
      continue;
    }
    if (v.lb == -kInf && v.ub == kInf) {
      line(os, "FR", "BND", cn, "");
      continue;
    }
    if (v.lb == v.ub) {
      line(os, "FX", "BND", cn, num(v.lb));
      continue;
    }
    if (v.lb == -kInf) line(os, "MI", "BND", cn, "");
    else if (v.lb != 0.0) line(os, "LO", "BND", cn, num(v.lb));
    if (v.ub != kInf) line(os, "UP", "BND", cn, num(v.ub));
  }
  os << "ENDATA\n";
}

void write_mps(std::ostream& os, const LinearProgram& lp, const std::string& name) {
  MipProblem p;
  p.lp = lp;
  p.types.assign(lp.vars.size(), VarType::Continuous);
  write_mps(os, p, name);
}

}  // namespace mmimo::milp
