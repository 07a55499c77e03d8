#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "rmab/index.hpp"
#include "rmab/lp.hpp"
#include "rmab/model.hpp"
#include "rmab/policy.hpp"

namespace rmab {

struct SimResult {
  std::string policy;
  int num_arms = 0;
  Eigen::VectorXi budgets;
  int replications = 0;
  std::vector<double> totals;  // per-replication total reward
  double mean_per_arm = 0;
  double ci_half = 0;  // 95% normal CI on the per-arm mean
  std::uint64_t seed = 0;
};

// How realized rewards relate to the spec's expected rewards during
// simulation: taken at face value, or sampled as Bernoulli outcomes with
// success probability r_t(s, 1) (tied to the sampled transition where the
// lattice metadata identifies the success successor).
enum class RewardRealization { kExpected, kBernoulli };

// Count-level Monte-Carlo execution of the index policy. success_state may
// be empty for generic specs; it is required for kBernoulli realization.
SimResult simulate_index_policy(const SubProcessSpec& spec,
                                const BudgetProfile& budget,
                                const IndexTable& indices,
                                const OccupationMeasure& rho,
                                const std::vector<int>& success_state,
                                RewardRealization realization, int reps,
                                std::uint64_t seed);

struct OccupancyDeviation {
  int num_arms = 0;
  // Mean over replications of max_{s,t} |N_t(s)/K - P_t(s)| and of
  // max_{s,t} |M_t(s)/K - P_t(s) * pi**(s,1,t)|.
  double state_deviation = 0;
  double activation_deviation = 0;
};

std::vector<OccupancyDeviation> occupancy_convergence_report(
    const SubProcessSpec& spec, const Eigen::VectorXd& alpha,
    const std::vector<int>& arm_counts, const IndexTable& indices,
    const OccupationMeasure& rho, const RandomizedPolicy& lp_policy,
    const std::vector<int>& success_state, RewardRealization realization,
    int reps, std::uint64_t seed);

// UCB baseline for the Bernoulli bandit: per period pull the m_t arms with
// the largest mu_i + width * delta_i; arms never pulled rank first.
SimResult simulate_ucb_mab(int horizon, const BudgetProfile& budget,
                           double width, int reps, std::uint64_t seed);

// Picks the grid point with the best training-run mean on an independently
// seeded data set.
double pretrain_ucb_width(int horizon, const BudgetProfile& budget,
                          const std::vector<double>& grid, int reps,
                          std::uint64_t seed);

// UCB for subset selection: measure by UCB score, then select the top
// designs by posterior mean.
SimResult simulate_ucb_subset(const SubsetSelectionSpec& problem,
                              int num_arms, double width, int reps,
                              std::uint64_t seed);

// OCBA-m baseline with the ranking adaptation (measure the designs with the
// largest desired allocations) and a one-success/one-failure warm start.
SimResult simulate_ocba_m(const SubsetSelectionSpec& problem, int num_arms,
                          int reps, std::uint64_t seed);

// Maximum parallel worker count; reads RMAB_THREADS, defaulting to the
// machine core count. Results are independent of the schedule.
int max_threads();

}  // namespace rmab
