#include "rmab/oracles.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

namespace rmab::oracle {

namespace {

// Backward induction over the product state space. Action vectors are
// bitmasks; the filter decides which are admissible at each period.
double product_space_dp(
    const SubProcessSpec& spec, int num_arms, const Eigen::VectorXi& budgets,
    const std::function<bool(int pulls, int t)>& admissible,
    const std::function<double(int pulls, int t)>& action_offset) {
  const int n = spec.num_states;
  const int T = spec.horizon;
  long joint_size = 1;
  for (int x = 0; x < num_arms; ++x) {
    joint_size *= n;
    if (joint_size > 2'000'000)
      throw std::invalid_argument("product state space too large");
  }
  if (budgets.size() != T)
    throw std::invalid_argument("budget length != horizon");

  std::vector<long> radix(num_arms, 1);
  for (int x = 1; x < num_arms; ++x) radix[x] = radix[x - 1] * n;

  std::vector<double> next(joint_size, 0.0), cur(joint_size, 0.0);
  std::vector<int> s(num_arms);
  for (int t = T - 1; t >= 0; --t) {
    for (long code = 0; code < joint_size; ++code) {
      long rest = code;
      for (int x = 0; x < num_arms; ++x) {
        s[x] = static_cast<int>(rest % n);
        rest /= n;
      }
      double best = -std::numeric_limits<double>::infinity();
      for (int mask = 0; mask < (1 << num_arms); ++mask) {
        const int pulls = __builtin_popcount(static_cast<unsigned>(mask));
        if (!admissible(pulls, t)) continue;
        double value = action_offset(pulls, t);
        for (int x = 0; x < num_arms; ++x)
          value += spec.reward[t](s[x], (mask >> x) & 1);
        if (t + 1 < T) {
          // Successor probabilities factorize across arms.
          std::function<void(int, long, double)> walk = [&](int x, long succ,
                                                            double prob) {
            if (prob == 0) return;
            if (x == num_arms) {
              value += prob * next[succ];
              return;
            }
            const auto& kernel = ((mask >> x) & 1) ? spec.kernel_active
                                                   : spec.kernel_passive;
            for (int sp = 0; sp < n; ++sp)
              walk(x + 1, succ + sp * radix[x], prob * kernel(s[x], sp));
          };
          walk(0, 0, 1.0);
        }
        best = std::max(best, value);
      }
      cur[code] = best;
    }
    std::swap(cur, next);
  }

  long init = 0;
  for (int x = 0; x < num_arms; ++x) init += spec.initial_state * radix[x];
  return next[init];
}

double log_factorial(int k) { return std::lgamma(k + 1.0); }

// Count vectors (compositions of K into |S| parts) in lexicographic order.
void enumerate_counts(int states_left, int arms_left, std::vector<int>& prefix,
                      std::vector<std::vector<int>>& out) {
  if (states_left == 1) {
    prefix.push_back(arms_left);
    out.push_back(prefix);
    prefix.pop_back();
    return;
  }
  for (int c = 0; c <= arms_left; ++c) {
    prefix.push_back(c);
    enumerate_counts(states_left - 1, arms_left - c, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

double joint_unconstrained_lagrangian(const SubProcessSpec& spec, int num_arms,
                                      const Multipliers& lambda,
                                      const Eigen::VectorXi& budgets) {
  return product_space_dp(
      spec, num_arms, budgets, [](int, int) { return true; },
      [&](int pulls, int t) { return -lambda[t] * (pulls - budgets[t]); });
}

double joint_constrained_optimum(const SubProcessSpec& spec, int num_arms,
                                 const Eigen::VectorXi& budgets) {
  return product_space_dp(
      spec, num_arms, budgets,
      [&](int pulls, int t) { return pulls == budgets[t]; },
      [](int, int) { return 0.0; });
}

double count_space_constrained_optimum(const SubProcessSpec& spec,
                                       int num_arms,
                                       const Eigen::VectorXi& budgets) {
  const int n = spec.num_states;
  const int T = spec.horizon;
  if (budgets.size() != T)
    throw std::invalid_argument("budget length != horizon");
  double log_states = 0;
  for (int i = 1; i < n; ++i)
    log_states += std::log((num_arms + i) / static_cast<double>(i));
  if (log_states > std::log(1e6))
    throw std::invalid_argument("count state space exceeds 1e6 states");

  std::vector<std::vector<int>> count_states;
  std::vector<int> prefix;
  enumerate_counts(n, num_arms, prefix, count_states);
  std::map<std::vector<int>, int> id;
  for (int i = 0; i < static_cast<int>(count_states.size()); ++i)
    id[count_states[i]] = i;

  std::vector<double> next(count_states.size(), 0.0);
  std::vector<double> cur(count_states.size(), 0.0);

  for (int t = T - 1; t >= 0; --t) {
    for (size_t ci = 0; ci < count_states.size(); ++ci) {
      const std::vector<int>& counts = count_states[ci];
      double best = -std::numeric_limits<double>::infinity();

      std::vector<int> plan(n, 0);
      std::vector<int> successor(n, 0);

      // Nested multinomial splits: group g in [0, 2n) is (state g/2,
      // active when g is even). Accumulates successor counts and the
      // joint log-probability, then reads off the continuation value.
      std::function<void(int, double, double&)> walk = [&](int g, double logp,
                                                           double& cont) {
        if (g == 2 * n) {
          cont += std::exp(logp) * next[id.at(successor)];
          return;
        }
        const int ss = g / 2;
        const bool active = (g % 2) == 0;
        const int arms = active ? plan[ss] : counts[ss] - plan[ss];
        if (arms == 0) {
          walk(g + 1, logp, cont);
          return;
        }
        const auto& kernel =
            active ? spec.kernel_active : spec.kernel_passive;
        std::function<void(int, int, double)> split = [&](int sp, int left,
                                                          double lp) {
          const double p = kernel(ss, sp);
          if (sp == n - 1) {
            if (p == 0.0 && left > 0) return;
            successor[sp] += left;
            walk(g + 1,
                 lp + (left > 0 ? left * std::log(p) : 0.0) -
                     log_factorial(left),
                 cont);
            successor[sp] -= left;
            return;
          }
          const int cap = p > 0 ? left : 0;
          for (int k = 0; k <= cap; ++k) {
            successor[sp] += k;
            split(sp + 1, left - k,
                  lp + (k > 0 ? k * std::log(p) : 0.0) - log_factorial(k));
            successor[sp] -= k;
          }
        };
        split(0, arms, logp + log_factorial(arms));
      };

      // Enumerate activation plans 0 <= plan[s] <= counts[s], sum = m_t.
      std::function<void(int, int)> enum_plans = [&](int s, int left) {
        if (s == n) {
          if (left != 0) return;
          double value = 0;
          for (int ss = 0; ss < n; ++ss)
            value += plan[ss] * spec.reward[t](ss, 1) +
                     (counts[ss] - plan[ss]) * spec.reward[t](ss, 0);
          if (t + 1 < T) {
            double cont = 0;
            walk(0, 0.0, cont);
            value += cont;
          }
          best = std::max(best, value);
          return;
        }
        const int cap = std::min(counts[s], left);
        for (int k = 0; k <= cap; ++k) {
          plan[s] = k;
          enum_plans(s + 1, left - k);
        }
        plan[s] = 0;
      };
      enum_plans(0, budgets[t]);
      cur[ci] = best;
    }
    std::swap(cur, next);
  }

  std::vector<int> start(n, 0);
  start[spec.initial_state] = num_arms;
  return next[id.at(start)];
}

}  // namespace rmab::oracle
