#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <vector>

#include "rmab/oracles.hpp"
#include "rmab/relax.hpp"
#include "rmab/sim.hpp"
#include "test_util.hpp"

using namespace rmab;

namespace {

struct Artifacts {
  Multipliers lambda;
  OccupationSolution occupation;
  IndexTable indices;
  RandomizedPolicy policy;
};

Artifacts solve_instance(const SubProcessSpec& spec,
                         const BudgetProfile& budget) {
  Artifacts out;
  out.lambda = multipliers_from_lp(spec, budget.fractions());
  out.occupation = solve_occupation(spec, out.lambda, budget.fractions());
  REQUIRE(out.occupation.lp.status == LpStatus::kOptimal);
  out.indices = index_table(spec, out.lambda);
  out.policy = extract_policy(out.occupation.rho, out.indices, out.lambda);
  return out;
}

// Exact expected total reward of the index policy, by propagating the full
// distribution over count states and enumerating multinomial splits.
double exact_index_policy_value(const SubProcessSpec& spec,
                                const BudgetProfile& budget,
                                const Artifacts& art) {
  const int n = spec.num_states;
  std::map<std::vector<int>, double> dist;
  std::vector<int> start(n, 0);
  start[spec.initial_state] = budget.num_arms;
  dist[start] = 1.0;

  double value = 0;
  for (int t = 0; t < spec.horizon; ++t) {
    std::map<std::vector<int>, double> next;
    for (const auto& [counts, prob] : dist) {
      SystemCounts sc;
      sc.n = Eigen::VectorXi::Zero(n);
      for (int s = 0; s < n; ++s) sc.n[s] = counts[s];
      sc.period = t;
      const ActivationPlan plan = select_activations(
          sc, art.indices, art.occupation.rho, budget.budgets[t]);
      for (int s = 0; s < n; ++s)
        value += prob * (plan.m_active[s] * spec.reward[t](s, 1) +
                         (counts[s] - plan.m_active[s]) * spec.reward[t](s, 0));

      // Convolve the multinomial splits of each (state, action) group.
      std::function<void(int, int, const std::vector<int>&, double)> group =
          [&](int s, int phase, const std::vector<int>& acc, double p) {
            if (s == n) {
              next[acc] += p;
              return;
            }
            const int arms = phase == 0 ? plan.m_active[s]
                                        : counts[s] - plan.m_active[s];
            const auto& kernel =
                phase == 0 ? spec.kernel_active : spec.kernel_passive;
            const int next_phase = phase == 0 ? 1 : 0;
            const int next_s = phase == 0 ? s : s + 1;
            std::function<void(int, int, const std::vector<int>&, double)>
                split = [&](int sp, int left, const std::vector<int>& a,
                            double q) {
                  if (sp == n - 1) {
                    std::vector<int> b = a;
                    b[sp] += left;
                    group(next_s, next_phase, b,
                          q * std::pow(kernel(s, sp), left));
                    return;
                  }
                  double choose = 1;
                  for (int k = 0; k <= left; ++k) {
                    std::vector<int> b = a;
                    b[sp] += k;
                    split(sp + 1, left - k, b,
                          q * choose * std::pow(kernel(s, sp), k));
                    choose = choose * (left - k) / (k + 1);
                  }
                };
            if (arms == 0) {
              group(next_s, next_phase, acc, p);
            } else {
              split(0, arms, acc, p);
            }
          };
      if (t + 1 < spec.horizon) group(0, 0, std::vector<int>(n, 0), prob);
    }
    if (t + 1 < spec.horizon) dist = std::move(next);
  }
  return value;
}

BudgetProfile flat_budget(int num_arms, int horizon, int per_period) {
  BudgetProfile budget;
  budget.num_arms = num_arms;
  budget.budgets = Eigen::VectorXi::Constant(horizon, per_period);
  return budget;
}

}  // namespace

TEST_CASE("identical seeds give bit-identical results") {
  std::mt19937_64 rng(101);
  const SubProcessSpec spec = testing::random_spec(rng, 3, 3);
  const BudgetProfile budget = flat_budget(5, 3, 2);
  const Artifacts art = solve_instance(spec, budget);
  const SimResult a = simulate_index_policy(
      spec, budget, art.indices, art.occupation.rho, {},
      RewardRealization::kExpected, 200, 42);
  const SimResult b = simulate_index_policy(
      spec, budget, art.indices, art.occupation.rho, {},
      RewardRealization::kExpected, 200, 42);
  REQUIRE(a.totals.size() == b.totals.size());
  for (size_t i = 0; i < a.totals.size(); ++i)
    CHECK(a.totals[i] == b.totals[i]);
  CHECK(a.mean_per_arm == b.mean_per_arm);
  CHECK(a.ci_half == b.ci_half);

  const SimResult c = simulate_index_policy(
      spec, budget, art.indices, art.occupation.rho, {},
      RewardRealization::kExpected, 200, 43);
  CHECK(c.mean_per_arm != a.mean_per_arm);
}

TEST_CASE("deterministic dynamics simulate with zero variance") {
  SubProcessSpec spec;
  spec.num_states = 2;
  spec.horizon = 3;
  spec.initial_state = 0;
  spec.kernel_active = Eigen::MatrixXd::Identity(2, 2);
  spec.kernel_passive = Eigen::MatrixXd::Identity(2, 2);
  Eigen::MatrixXd r(2, 2);
  r << 0.1, 0.8, 0.2, 0.4;
  spec.reward.assign(3, r);
  const BudgetProfile budget = flat_budget(6, 3, 2);
  const Artifacts art = solve_instance(spec, budget);
  const SimResult result = simulate_index_policy(
      spec, budget, art.indices, art.occupation.rho, {},
      RewardRealization::kExpected, 50, 7);
  CHECK(result.ci_half == 0.0);
  // Everyone stays in state 0: two pulls and four idle arms per period.
  const double exact = 3 * (2 * 0.8 + 4 * 0.1);
  CHECK(result.mean_per_arm == doctest::Approx(exact / 6).epsilon(1e-12));
  CHECK(result.mean_per_arm ==
        doctest::Approx(exact_index_policy_value(spec, budget, art) / 6)
            .epsilon(1e-12));
}

TEST_CASE("simulated mean matches the exact count-chain evaluation") {
  std::mt19937_64 rng(103);
  for (int trial = 0; trial < 5; ++trial) {
    const SubProcessSpec spec = testing::random_spec(rng, 3, 2);
    const BudgetProfile budget = flat_budget(3, 2, 1);
    const Artifacts art = solve_instance(spec, budget);
    const double exact = exact_index_policy_value(spec, budget, art);
    const SimResult result = simulate_index_policy(
        spec, budget, art.indices, art.occupation.rho, {},
        RewardRealization::kExpected, 4000, 11 + trial);
    const double slack = std::max(3 * result.ci_half, 1e-9);
    CHECK(std::abs(result.mean_per_arm - exact / budget.num_arms) <= slack);
  }
}

TEST_CASE("index policy value never beats the constrained optimum or bound") {
  std::mt19937_64 rng(107);
  for (int trial = 0; trial < 5; ++trial) {
    const SubProcessSpec spec = testing::random_spec(rng, 3, 3);
    const BudgetProfile budget = flat_budget(3, 3, 1);
    const Artifacts art = solve_instance(spec, budget);
    const double policy_value = exact_index_policy_value(spec, budget, art);
    const double optimum =
        oracle::count_space_constrained_optimum(spec, 3, budget.budgets);
    const double bound = bound_from_lp(spec, budget).bound_value;
    CHECK(policy_value <= optimum + 1e-9);
    CHECK(optimum <= bound + 1e-9);
  }
}

TEST_CASE("count-space oracle agrees with product-space enumeration") {
  std::mt19937_64 rng(109);
  for (int trial = 0; trial < 5; ++trial) {
    const SubProcessSpec spec = testing::random_spec(rng, 2, 2);
    const Eigen::VectorXi budgets = Eigen::VectorXi::Ones(2);
    CHECK(oracle::count_space_constrained_optimum(spec, 2, budgets) ==
          doctest::Approx(oracle::joint_constrained_optimum(spec, 2, budgets))
              .epsilon(1e-10));
  }
}

TEST_CASE("single-arm oracle degenerates to the forced-pull chain") {
  std::mt19937_64 rng(113);
  const SubProcessSpec spec = testing::random_spec(rng, 3, 3);
  const Eigen::VectorXi budgets = Eigen::VectorXi::Ones(3);
  RandomizedPolicy always;
  always.active = Eigen::MatrixXd::Ones(3, 3);
  CHECK(oracle::count_space_constrained_optimum(spec, 1, budgets) ==
        doctest::Approx(evaluate_policy(spec, always, Multipliers::Zero(3)))
            .epsilon(1e-10));
}

TEST_CASE("bernoulli realization stays near the expected-reward mean") {
  const BernoulliLatticeSpec mab = build_bernoulli_mab(4, 1, 1);
  const BudgetProfile budget = flat_budget(6, 4, 2);
  const Artifacts art = solve_instance(mab.spec, budget);
  const SimResult expected = simulate_index_policy(
      mab.spec, budget, art.indices, art.occupation.rho, mab.success_state,
      RewardRealization::kExpected, 4000, 5);
  const SimResult realized = simulate_index_policy(
      mab.spec, budget, art.indices, art.occupation.rho, mab.success_state,
      RewardRealization::kBernoulli, 4000, 5);
  // Same mean, extra sampling noise.
  CHECK(std::abs(realized.mean_per_arm - expected.mean_per_arm) <=
        3 * (realized.ci_half + expected.ci_half));
  CHECK(realized.ci_half >= expected.ci_half);
}

TEST_CASE("occupancy deviations shrink as the system grows") {
  const BernoulliLatticeSpec mab = build_bernoulli_mab(4, 1, 1);
  const Eigen::VectorXd alpha = Eigen::VectorXd::Constant(4, 1.0 / 3.0);
  const Multipliers lambda = multipliers_from_lp(mab.spec, alpha);
  const OccupationSolution sol = solve_occupation(mab.spec, lambda, alpha);
  REQUIRE(sol.lp.status == LpStatus::kOptimal);
  const IndexTable indices = index_table(mab.spec, lambda);
  const RandomizedPolicy policy = extract_policy(sol.rho, indices, lambda);
  const std::vector<OccupancyDeviation> report = occupancy_convergence_report(
      mab.spec, alpha, {12, 240}, indices, sol.rho, policy,
      mab.success_state, RewardRealization::kExpected, 200, 17);
  REQUIRE(report.size() == 2);
  CHECK(report[0].num_arms == 12);
  CHECK(report[1].state_deviation < report[0].state_deviation);
  CHECK(report[1].activation_deviation < report[0].activation_deviation);
}

TEST_CASE("ucb with budget equal to arm count is forced") {
  BudgetProfile budget = flat_budget(8, 6, 8);
  const SimResult result = simulate_ucb_mab(6, budget, 1.0, 3000, 23);
  // Every arm pulled every period; realized rewards are prior-predictive
  // Bernoulli(1/2), so the per-arm total concentrates on 3.
  CHECK(std::abs(result.mean_per_arm - 3.0) <= 4 * result.ci_half);
  CHECK(result.ci_half > 0.0);
}

TEST_CASE("ucb is deterministic and seed-sensitive") {
  const BudgetProfile budget = flat_budget(12, 6, 4);
  const SimResult a = simulate_ucb_mab(6, budget, 0.5, 500, 31);
  const SimResult b = simulate_ucb_mab(6, budget, 0.5, 500, 31);
  CHECK(a.mean_per_arm == b.mean_per_arm);
  CHECK(a.ci_half == b.ci_half);
  const SimResult c = simulate_ucb_mab(6, budget, 0.5, 500, 32);
  CHECK(c.mean_per_arm != a.mean_per_arm);
}

TEST_CASE("width pretraining returns a grid member, reproducibly") {
  const BudgetProfile budget = flat_budget(12, 6, 4);
  CHECK(pretrain_ucb_width(6, budget, {1.5}, 50, 3) == 1.5);
  const double first =
      pretrain_ucb_width(6, budget, {0.0, 0.5, 1.0, 2.0, 5.0}, 300, 3);
  const double second =
      pretrain_ucb_width(6, budget, {0.0, 0.5, 1.0, 2.0, 5.0}, 300, 3);
  CHECK(first == second);
  const bool on_grid = first == 0.0 || first == 0.5 || first == 1.0 ||
                       first == 2.0 || first == 5.0;
  CHECK(on_grid);
}

TEST_CASE("ocba-m runs deterministically on the subset instance") {
  const SubsetSelectionSpec problem = build_subset_selection(4, 0.3, 0.5);
  const SimResult a = simulate_ocba_m(problem, 10, 400, 19);
  const SimResult b = simulate_ocba_m(problem, 10, 400, 19);
  CHECK(a.mean_per_arm == b.mean_per_arm);
  CHECK(a.replications == 400);
  // Selecting 3 of 10 Beta(1,1) designs after informative measurement must
  // beat blind selection (3 * 0.5 per 10 arms) and respect the cap.
  CHECK(a.mean_per_arm > 0.15);
  CHECK(a.mean_per_arm < 0.3);
}

TEST_CASE("thread count respects the environment override") {
  CHECK(max_threads() >= 1);
}
