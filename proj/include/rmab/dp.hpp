#pragma once

#include <Eigen/Dense>

#include "rmab/model.hpp"

namespace rmab {

// Lagrange multipliers lambda_1..lambda_T pricing one activation per period.
using Multipliers = Eigen::VectorXd;

// Lookahead differences within this band count as ties; ties resolve to the
// active action throughout.
inline constexpr double kTieEpsilon = 1e-9;

// v(s, t) for t in [0, T]; column T is the zero sentinel.
struct ValueTable {
  Eigen::MatrixXd v;  // num_states x (horizon + 1)
};

// Markov policy; stores the activation probability, so row sums over actions
// are 1 by construction. Deterministic policies are the {0,1}-valued case.
struct RandomizedPolicy {
  Eigen::MatrixXd active;  // num_states x horizon, P(a=1 | s, t)

  double prob(int s, int a, int t) const {
    return a == 1 ? active(s, t) : 1.0 - active(s, t);
  }
};

// p(s, t): probability of occupying state s at period t under some policy.
struct StateMarginals {
  Eigen::MatrixXd p;  // num_states x horizon
};

// Value of the sub-MDP with adjusted rewards r_t(s,a) - a*lambda_t, solved
// exactly by backward induction.
ValueTable backward_induction(const SubProcessSpec& spec,
                              const Multipliers& lambda);

// One-step lookahead r_t(s,a) - a*lambda_t + sum_s' P^a(s,s') v(s', t+1).
double lookahead(const SubProcessSpec& spec, const Multipliers& lambda,
                 const ValueTable& values, int s, int a, int t);

// The tie-to-active optimal deterministic policy for the given value table.
RandomizedPolicy greedy_policy(const SubProcessSpec& spec,
                               const Multipliers& lambda,
                               const ValueTable& values);
RandomizedPolicy greedy_policy(const SubProcessSpec& spec,
                               const Multipliers& lambda);

// Q(lambda): the optimal adjusted value from the initial state.
double q_value(const SubProcessSpec& spec, const Multipliers& lambda);

// Forward propagation of the state distribution under a policy.
StateMarginals state_marginals(const SubProcessSpec& spec,
                               const RandomizedPolicy& policy);

// E[A_t] for each period under the policy.
Eigen::VectorXd activation_profile(const SubProcessSpec& spec,
                                   const RandomizedPolicy& policy);

// Expected total adjusted reward of the policy from the initial state.
double evaluate_policy(const SubProcessSpec& spec,
                       const RandomizedPolicy& policy,
                       const Multipliers& lambda);

}  // namespace rmab
