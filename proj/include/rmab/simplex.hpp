#pragma once

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

namespace rmab {

// Equality-form program: maximize c'x subject to Ax = b, x >= 0.
struct LinearProgram {
  Eigen::VectorXd objective;  // c
  Eigen::MatrixXd rows;       // A, one row per constraint
  Eigen::VectorXd rhs;        // b
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  Eigen::VectorXd primal;  // x, basic feasible when optimal
  Eigen::VectorXd dual;    // y, one multiplier per constraint row
  double objective = 0;
};

// Two-phase primal simplex on a dense tableau with Bland's rule.
// Deterministic; degenerate instances terminate by the anti-cycling rule.
LpSolution simplex_solve(const LinearProgram& lp);

// Debug dump of the raw LP data for failure triage.
nlohmann::json lp_debug_dump(const LinearProgram& lp);

}  // namespace rmab
