#include "rmab/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>

#include "rmab/dp.hpp"

namespace rmab {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::mt19937_64 replication_rng(std::uint64_t seed, int replication) {
  return std::mt19937_64(
      splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(replication))));
}

// Runs one closure per replication, possibly across threads; totals land in
// a preallocated slot per replication, so aggregation is order-independent.
std::vector<double> run_replications(
    int reps, std::uint64_t seed,
    const std::function<double(std::mt19937_64&)>& body) {
  std::vector<double> totals(reps, 0.0);
  const int workers = std::max(1, std::min(max_threads(), reps));
  std::atomic<int> cursor{0};
  auto work = [&]() {
    for (;;) {
      const int rep = cursor.fetch_add(1);
      if (rep >= reps) return;
      std::mt19937_64 rng = replication_rng(seed, rep);
      totals[rep] = body(rng);
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  return totals;
}

SimResult summarize(std::string policy, const BudgetProfile& budget,
                    std::vector<double> totals, std::uint64_t seed) {
  SimResult out;
  out.policy = std::move(policy);
  out.num_arms = budget.num_arms;
  out.budgets = budget.budgets;
  out.replications = static_cast<int>(totals.size());
  out.seed = seed;
  const double k = budget.num_arms;
  double mean = 0;
  for (double v : totals) mean += v / k;
  mean /= out.replications;
  double var = 0;
  for (double v : totals) var += (v / k - mean) * (v / k - mean);
  var = out.replications > 1 ? var / (out.replications - 1) : 0.0;
  out.mean_per_arm = mean;
  out.ci_half = 1.96 * std::sqrt(var / out.replications);
  out.totals = std::move(totals);
  return out;
}

// Multinomial split of `count` arms along a kernel row, by sequential
// conditional binomials.
void split_counts(std::mt19937_64& rng, int count,
                  const Eigen::MatrixXd& kernel, int s,
                  Eigen::VectorXi& into) {
  if (count == 0) return;
  const int n = static_cast<int>(kernel.cols());
  double remaining_mass = 1.0;
  int remaining = count;
  for (int sp = 0; sp < n && remaining > 0; ++sp) {
    const double p = kernel(s, sp);
    if (p <= 0) continue;
    if (p >= remaining_mass - 1e-15) {
      into[sp] += remaining;
      return;
    }
    std::binomial_distribution<int> bin(remaining, p / remaining_mass);
    const int k = bin(rng);
    into[sp] += k;
    remaining -= k;
    remaining_mass -= p;
  }
  if (remaining > 0) into[static_cast<int>(kernel.cols()) - 1] += remaining;
}

struct IndexReplicationObserver {
  // Called once per period with the pre-transition counts and the plan.
  std::function<void(int t, const Eigen::VectorXi& counts,
                     const Eigen::VectorXi& active)>
      on_period;
};

double run_index_replication(const SubProcessSpec& spec,
                             const BudgetProfile& budget,
                             const IndexTable& indices,
                             const OccupationMeasure& rho,
                             const std::vector<int>& success_state,
                             RewardRealization realization,
                             std::mt19937_64& rng,
                             const IndexReplicationObserver* observer) {
  const int n = spec.num_states;
  const bool bernoulli = realization == RewardRealization::kBernoulli;
  if (bernoulli && static_cast<int>(success_state.size()) != n)
    throw std::invalid_argument(
        "Bernoulli realization needs success-state metadata");

  Eigen::VectorXi counts = Eigen::VectorXi::Zero(n);
  counts[spec.initial_state] = budget.num_arms;
  Eigen::VectorXi next_counts(n);
  double total = 0;

  for (int t = 0; t < spec.horizon; ++t) {
    const ActivationPlan plan =
        select_activations({counts, t}, indices, rho, budget.budgets[t]);
    if (observer && observer->on_period)
      observer->on_period(t, counts, plan.m_active);

    next_counts.setZero();
    for (int s = 0; s < n; ++s) {
      const int active = plan.m_active[s];
      const int passive = counts[s] - active;
      total += passive * spec.reward[t](s, 0);

      if (active > 0) {
        if (!bernoulli) {
          total += active * spec.reward[t](s, 1);
          split_counts(rng, active, spec.kernel_active, s, next_counts);
        } else if (success_state[s] >= 0) {
          // Realized reward is 1 exactly on the success transition.
          const int win_state = success_state[s];
          std::binomial_distribution<int> bin(active,
                                              spec.kernel_active(s, win_state));
          const int wins = bin(rng);
          total += wins;
          next_counts[win_state] += wins;
          if (wins < active) {
            // The failure successor carries the rest of the row's mass.
            int lose_state = -1;
            for (int sp = 0; sp < n; ++sp)
              if (sp != win_state && spec.kernel_active(s, sp) > 0) {
                lose_state = sp;
                break;
              }
            next_counts[lose_state] += active - wins;
          }
        } else {
          // Frontier self-loop: sample the reward on its own.
          const double p = spec.reward[t](s, 1);
          if (p > 0) {
            std::binomial_distribution<int> bin(active, std::min(1.0, p));
            total += bin(rng);
          }
          split_counts(rng, active, spec.kernel_active, s, next_counts);
        }
      }
      split_counts(rng, passive, spec.kernel_passive, s, next_counts);
    }
    counts.swap(next_counts);
  }
  return total;
}

}  // namespace

int max_threads() {
  if (const char* env = std::getenv("RMAB_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

SimResult simulate_index_policy(const SubProcessSpec& spec,
                                const BudgetProfile& budget,
                                const IndexTable& indices,
                                const OccupationMeasure& rho,
                                const std::vector<int>& success_state,
                                RewardRealization realization, int reps,
                                std::uint64_t seed) {
  auto totals = run_replications(reps, seed, [&](std::mt19937_64& rng) {
    return run_index_replication(spec, budget, indices, rho, success_state,
                                 realization, rng, nullptr);
  });
  return summarize("index", budget, std::move(totals), seed);
}

std::vector<OccupancyDeviation> occupancy_convergence_report(
    const SubProcessSpec& spec, const Eigen::VectorXd& alpha,
    const std::vector<int>& arm_counts, const IndexTable& indices,
    const OccupationMeasure& rho, const RandomizedPolicy& lp_policy,
    const std::vector<int>& success_state, RewardRealization realization,
    int reps, std::uint64_t seed) {
  const StateMarginals marginals = state_marginals(spec, lp_policy);
  std::vector<OccupancyDeviation> out;
  for (int K : arm_counts) {
    BudgetProfile budget;
    budget.num_arms = K;
    budget.budgets.resize(spec.horizon);
    for (int t = 0; t < spec.horizon; ++t)
      budget.budgets[t] = static_cast<int>(std::floor(alpha[t] * K));

    std::vector<double> state_devs(reps, 0.0), act_devs(reps, 0.0);
    std::atomic<int> cursor{0};
    const int workers = std::max(1, std::min(max_threads(), reps));
    auto work = [&]() {
      for (;;) {
        const int rep = cursor.fetch_add(1);
        if (rep >= reps) return;
        std::mt19937_64 rng = replication_rng(seed, rep);
        double worst_state = 0, worst_act = 0;
        IndexReplicationObserver obs;
        obs.on_period = [&](int t, const Eigen::VectorXi& counts,
                            const Eigen::VectorXi& active) {
          for (int s = 0; s < spec.num_states; ++s) {
            worst_state = std::max(
                worst_state, std::abs(static_cast<double>(counts[s]) / K -
                                      marginals.p(s, t)));
            worst_act = std::max(
                worst_act,
                std::abs(static_cast<double>(active[s]) / K -
                         marginals.p(s, t) * lp_policy.active(s, t)));
          }
        };
        run_index_replication(spec, budget, indices, rho, success_state,
                              realization, rng, &obs);
        state_devs[rep] = worst_state;
        act_devs[rep] = worst_act;
      }
    };
    if (workers == 1) {
      work();
    } else {
      std::vector<std::thread> pool;
      for (int w = 0; w < workers; ++w) pool.emplace_back(work);
      for (auto& th : pool) th.join();
    }

    OccupancyDeviation dev;
    dev.num_arms = K;
    dev.state_deviation =
        std::accumulate(state_devs.begin(), state_devs.end(), 0.0) / reps;
    dev.activation_deviation =
        std::accumulate(act_devs.begin(), act_devs.end(), 0.0) / reps;
    out.push_back(dev);
  }
  return out;
}

namespace {

// Selects the `take` arms with the largest scores, ties by smaller index.
std::vector<int> top_arms(const std::vector<double>& score, int take) {
  std::vector<int> order(score.size());
  std::iota(order.begin(), order.end(), 0);
  std::nth_element(order.begin(), order.begin() + take, order.end(),
                   [&](int a, int b) {
                     if (score[a] != score[b]) return score[a] > score[b];
                     return a < b;
                   });
  order.resize(take);
  return order;
}

struct ArmStats {
  int pulls = 0;
  int successes = 0;

  double mean() const { return static_cast<double>(successes) / pulls; }
  double ucb_score(double width) const {
    if (pulls == 0) return std::numeric_limits<double>::infinity();
    const double mu = mean();
    return mu + width * std::sqrt(mu * (1.0 - mu));
  }
  double posterior_mean() const {
    return (successes + 1.0) / (pulls + 2.0);
  }
};

}  // namespace

SimResult simulate_ucb_mab(int horizon, const BudgetProfile& budget,
                           double width, int reps, std::uint64_t seed) {
  const int K = budget.num_arms;
  auto totals = run_replications(reps, seed, [&](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::vector<double> theta(K);
    for (double& th : theta) th = uniform(rng);
    std::vector<ArmStats> stats(K);
    std::vector<double> score(K);
    double total = 0;
    for (int t = 0; t < horizon; ++t) {
      for (int i = 0; i < K; ++i) score[i] = stats[i].ucb_score(width);
      for (int i : top_arms(score, budget.budgets[t])) {
        const int outcome = uniform(rng) < theta[i] ? 1 : 0;
        total += outcome;
        ++stats[i].pulls;
        stats[i].successes += outcome;
      }
    }
    return total;
  });
  return summarize("ucb", budget, std::move(totals), seed);
}

double pretrain_ucb_width(int horizon, const BudgetProfile& budget,
                          const std::vector<double>& grid, int reps,
                          std::uint64_t seed) {
  if (grid.empty()) throw std::invalid_argument("empty width grid");
  const std::uint64_t train_seed = splitmix64(seed ^ 0x7261696Eull);
  double best_width = grid.front();
  double best_mean = -std::numeric_limits<double>::infinity();
  for (double width : grid) {
    const SimResult r =
        simulate_ucb_mab(horizon, budget, width, reps, train_seed);
    if (r.mean_per_arm > best_mean) {
      best_mean = r.mean_per_arm;
      best_width = width;
    }
  }
  return best_width;
}

SimResult simulate_ucb_subset(const SubsetSelectionSpec& problem,
                              int num_arms, double width, int reps,
                              std::uint64_t seed) {
  const BudgetProfile budget = problem.budget_for(num_arms);
  const int K = num_arms;
  const int T = problem.measure_horizon;
  auto totals = run_replications(reps, seed, [&](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::vector<double> theta(K);
    for (double& th : theta) th = uniform(rng);
    std::vector<ArmStats> stats(K);
    std::vector<double> score(K);
    for (int t = 0; t < T; ++t) {
      for (int i = 0; i < K; ++i) score[i] = stats[i].ucb_score(width);
      for (int i : top_arms(score, budget.budgets[t])) {
        const int outcome = uniform(rng) < theta[i] ? 1 : 0;
        ++stats[i].pulls;
        stats[i].successes += outcome;
      }
    }
    for (int i = 0; i < K; ++i) score[i] = stats[i].posterior_mean();
    double total = 0;
    for (int i : top_arms(score, budget.budgets[T]))
      total += stats[i].posterior_mean();
    return total;
  });
  SimResult out = summarize("ucb", budget, std::move(totals), seed);
  return out;
}

SimResult simulate_ocba_m(const SubsetSelectionSpec& problem, int num_arms,
                          int reps, std::uint64_t seed) {
  const BudgetProfile budget = problem.budget_for(num_arms);
  const int K = num_arms;
  const int T = problem.measure_horizon;
  const int select = budget.budgets[T];
  auto totals = run_replications(reps, seed, [&](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::vector<double> theta(K);
    for (double& th : theta) th = uniform(rng);

    // Warm start: one success and one failure per design, on top of the
    // measured budget. Real outcomes are tracked separately for scoring.
    std::vector<ArmStats> warm(K), real(K);
    for (auto& w : warm) {
      w.pulls = 2;
      w.successes = 1;
    }

    std::vector<double> desire(K), means(K);
    for (int t = 0; t < T; ++t) {
      for (int i = 0; i < K; ++i) means[i] = warm[i].mean();
      // Reference point between the m-th and (m+1)-th best sample means.
      std::vector<double> sorted = means;
      std::nth_element(sorted.begin(), sorted.begin() + select - 1,
                       sorted.end(), std::greater<double>());
      const double mth = sorted[select - 1];
      std::nth_element(sorted.begin(), sorted.begin() + select, sorted.end(),
                       std::greater<double>());
      const double next = sorted[select];
      const double c = 0.5 * (mth + next);
      for (int i = 0; i < K; ++i) {
        const double delta = std::max(std::abs(means[i] - c), 1e-12);
        const double var = std::max(means[i] * (1.0 - means[i]), 1e-12);
        desire[i] = var / (delta * delta);
      }
      for (int i : top_arms(desire, budget.budgets[t])) {
        const int outcome = uniform(rng) < theta[i] ? 1 : 0;
        ++warm[i].pulls;
        warm[i].successes += outcome;
        ++real[i].pulls;
        real[i].successes += outcome;
      }
    }
    for (int i = 0; i < K; ++i) means[i] = warm[i].mean();
    double total = 0;
    for (int i : top_arms(means, select)) total += real[i].posterior_mean();
    return total;
  });
  return summarize("ocba_m", budget, std::move(totals), seed);
}

}  // namespace rmab
