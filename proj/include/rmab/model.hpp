#pragma once

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

namespace rmab {

// One arm's finite-state finite-horizon MDP. Actions are binary:
// a=1 (active) and a=0 (passive). Time is 0-based internally, t in [0, T).
struct SubProcessSpec {
  int num_states = 0;
  int horizon = 0;  // T
  int initial_state = 0;
  // reward[t] is num_states x 2; column a holds r_t(s, a).
  std::vector<Eigen::MatrixXd> reward;
  Eigen::MatrixXd kernel_active;   // num_states x num_states
  Eigen::MatrixXd kernel_passive;  // num_states x num_states

  double max_reward() const;
};

// Per-period activation budgets m_t for a system of num_arms arms.
struct BudgetProfile {
  int num_arms = 0;         // K
  Eigen::VectorXi budgets;  // length T, 0 < m_t < K

  Eigen::VectorXd fractions() const;  // alpha_t = m_t / K
};

// Returns every invariant violation with its location; empty iff well-formed.
std::vector<std::string> validate(const SubProcessSpec& spec);

// Beta posterior parameters; the state of one Bernoulli arm.
struct PosteriorState {
  int alpha = 1;
  int beta = 1;
};

// A spec built on the Beta-posterior lattice, with the metadata the
// simulator needs to tie realized 0/1 rewards to sampled transitions.
struct BernoulliLatticeSpec {
  SubProcessSpec spec;
  std::vector<PosteriorState> states;
  // success_state[s]: successor index when an active pull succeeds.
  // kSampleReward marks frontier states whose realized reward must be
  // drawn separately (their kernel row is a self-loop).
  std::vector<int> success_state;

  static constexpr int kSampleReward = -2;

  int state_of(int a, int b) const;  // -1 if (a,b) not on the lattice
};

// Bayesian Bernoulli bandit with a Beta(prior_a, prior_b) prior on each arm.
// Active reward is the posterior mean a/(a+b); passive kernel is identity.
BernoulliLatticeSpec build_bernoulli_mab(int horizon, int prior_a, int prior_b);

// Subset selection: T measurement periods with zero reward followed by one
// selection period whose active reward is the posterior mean.
struct SubsetSelectionSpec {
  BernoulliLatticeSpec lattice;  // horizon T+1
  int measure_horizon = 0;       // T
  double select_fraction = 0;    // m / K, applied at period T+1
  double measure_fraction = 0;   // m-bar / K, applied at periods 1..T

  BudgetProfile budget_for(int num_arms) const;
  Eigen::VectorXd alpha() const;  // the per-period budget fractions
};

SubsetSelectionSpec build_subset_selection(int measure_horizon,
                                           double select_fraction,
                                           double measure_fraction,
                                           int prior_a = 1, int prior_b = 1);

nlohmann::json to_json(const SubProcessSpec& spec);
SubProcessSpec spec_from_json(const nlohmann::json& doc);

}  // namespace rmab
