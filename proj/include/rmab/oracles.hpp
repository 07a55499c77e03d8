#pragma once

#include <Eigen/Dense>

#include "rmab/dp.hpp"
#include "rmab/model.hpp"

namespace rmab::oracle {

// Exact value of the unconstrained joint Lagrangian
//   max_pi E[sum_t R_t - sum_t lambda_t (|A_t| - m_t)]
// by backward induction over the K-fold product state space with all 2^K
// action vectors. Independent of the single-arm decomposition.
double joint_unconstrained_lagrangian(const SubProcessSpec& spec, int num_arms,
                                      const Multipliers& lambda,
                                      const Eigen::VectorXi& budgets);

// Exact optimum of the budget-constrained joint MDP over the product state
// space (actions restricted to |A_t| = m_t). Feasible only for tiny K.
double joint_constrained_optimum(const SubProcessSpec& spec, int num_arms,
                                 const Eigen::VectorXi& budgets);

// Exact optimum of the budget-constrained joint MDP by backward induction
// over the count representation of the joint state, enumerating every
// feasible activation plan per period. Rejects instances whose count-state
// space exceeds one million states.
double count_space_constrained_optimum(const SubProcessSpec& spec,
                                       int num_arms,
                                       const Eigen::VectorXi& budgets);

}  // namespace rmab::oracle
