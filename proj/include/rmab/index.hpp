#pragma once

#include <Eigen/Dense>

#include "rmab/dp.hpp"
#include "rmab/model.hpp"

namespace rmab {

// beta(s, t): the largest pull price at which activating in state s at
// period t stays optimal when only the period-t multiplier is perturbed.
struct IndexTable {
  Eigen::MatrixXd beta;  // num_states x horizon
  Multipliers lambda_star;
  double search_bound = 0;  // U; entries of -U mean "never pull in range"
};

inline constexpr double kDefaultIndexTol = 1e-6;

// Whether the tie-to-active optimal policy for lambda* with its t-th entry
// replaced by the trial price plays the active action at (s, t).
bool active_at(const SubProcessSpec& spec, const Multipliers& lambda_star,
               int s, int t, double trial_price);

// Bisection on [-U, U] with U = T * max reward; returns -U when the state
// is inactive even at the lower endpoint.
double compute_index(const SubProcessSpec& spec,
                     const Multipliers& lambda_star, int s, int t,
                     double tol = kDefaultIndexTol);

IndexTable index_table(const SubProcessSpec& spec,
                       const Multipliers& lambda_star,
                       double tol = kDefaultIndexTol);

}  // namespace rmab
