#pragma once

// Fixed-format MPS export for cross-checking models with external solvers.
//
// Rows are named R0000001.., columns C0000001.. so every name fits the
// eight-character fields; user-supplied names are emitted as comment lines.
// Maximization is written with an OBJSENSE MAX section, integer columns are
// bracketed by MARKER lines.

#include <iosfwd>
#include <string>

#include "mmimo/milp/mip.hpp"

namespace mmimo::milp {

void write_mps(std::ostream& os, const MipProblem& p, const std::string& name = "MMIMO");
void write_mps(std::ostream& os, const LinearProgram& lp, const std::string& name = "MMIMO");

}  // namespace mmimo::milp
