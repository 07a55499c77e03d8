#pragma once

#include <Eigen/Dense>

#include "rmab/dp.hpp"
#include "rmab/index.hpp"
#include "rmab/model.hpp"
#include "rmab/simplex.hpp"

namespace rmab {

// rho(s, a, t): probability of occupying state s and taking action a at t.
struct OccupationMeasure {
  Eigen::MatrixXd active;   // num_states x horizon
  Eigen::MatrixXd passive;  // num_states x horizon

  double mass(int s, int t) const { return active(s, t) + passive(s, t); }
};

// Column index of rho(s, a, t) in the occupation LP.
int occupation_variable(const SubProcessSpec& spec, int s, int a, int t);

// The occupation-measure LP: maximize adjusted reward subject to the budget
// rows (one per period, listed first), initial rows, and flow-balance rows.
LinearProgram build_occupation_lp(const SubProcessSpec& spec,
                                  const Multipliers& lambda_star,
                                  const Eigen::VectorXd& alpha);

struct OccupationSolution {
  OccupationMeasure rho;
  LpSolution lp;
};

OccupationSolution solve_occupation(const SubProcessSpec& spec,
                                    const Multipliers& lambda_star,
                                    const Eigen::VectorXd& alpha);

// Zero-mass branch threshold for policy extraction.
inline constexpr double kMassFloor = 1e-10;

// Builds pi** by conditioning rho on the state; zero-mass states fall back
// to comparing the index against lambda*, with ties going active.
RandomizedPolicy extract_policy(const OccupationMeasure& rho,
                                const IndexTable& indices,
                                const Multipliers& lambda_star);

// lambda* read off the budget-row duals of the LP with unadjusted rewards.
Multipliers multipliers_from_lp(const SubProcessSpec& spec,
                                const Eigen::VectorXd& alpha);

}  // namespace rmab
