#pragma once

#include <Eigen/Dense>
#include <string>

#include "rmab/dp.hpp"
#include "rmab/model.hpp"

namespace rmab {

// The Lagrangian bound at its minimizing multipliers, with the identity
// bound_value = K * q_value + sum_t m_t * lambda_t holding by construction.
struct BoundReport {
  Multipliers lambda_star;
  double bound_value = 0;
  double q_value = 0;
  std::string method;  // "subgradient" or "lp_dual"
  int iterations = 0;
};

// P(lambda, m, K) = K * Q(lambda) + sum_t m_t * lambda_t.
double lagrangian_value(const SubProcessSpec& spec, const Multipliers& lambda,
                        const BudgetProfile& budget);

// Subgradient (m_t - K * E[A_t]) under the tie-to-active optimal policy.
Eigen::VectorXd bound_subgradient(const SubProcessSpec& spec,
                                  const Multipliers& lambda,
                                  const BudgetProfile& budget);

struct SubgradientOptions {
  int max_steps = 2000;
  // Step at iteration k is step_scale / sqrt(k); nonpositive means the
  // default T * max_reward / 10.
  double step_scale = 0;
  double stall_tol = 1e-9;
  int stall_window = 200;
};

// Projected subgradient descent on [0, T * max_reward]^T, returning the
// best iterate seen.
BoundReport minimize_bound_subgradient(const SubProcessSpec& spec,
                                       const BudgetProfile& budget,
                                       const SubgradientOptions& options = {});

// The exact route: lambda* from the budget-row duals of the occupation LP.
BoundReport bound_from_lp(const SubProcessSpec& spec,
                          const BudgetProfile& budget);

}  // namespace rmab
