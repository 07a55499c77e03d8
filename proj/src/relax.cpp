#include "rmab/relax.hpp"

#include <cmath>

#include "rmab/lp.hpp"

namespace rmab {

double lagrangian_value(const SubProcessSpec& spec, const Multipliers& lambda,
                        const BudgetProfile& budget) {
  return budget.num_arms * q_value(spec, lambda) +
         budget.budgets.cast<double>().dot(lambda);
}

Eigen::VectorXd bound_subgradient(const SubProcessSpec& spec,
                                  const Multipliers& lambda,
                                  const BudgetProfile& budget) {
  const Eigen::VectorXd profile =
      activation_profile(spec, greedy_policy(spec, lambda));
  return budget.budgets.cast<double>() - budget.num_arms * profile;
}

BoundReport minimize_bound_subgradient(const SubProcessSpec& spec,
                                       const BudgetProfile& budget,
                                       const SubgradientOptions& options) {
  const double box = spec.horizon * spec.max_reward();
  const double scale =
      options.step_scale > 0 ? options.step_scale : box / 10.0;

  Multipliers lambda = Multipliers::Zero(spec.horizon);
  BoundReport best;
  best.method = "subgradient";
  best.lambda_star = lambda;
  best.q_value = q_value(spec, lambda);
  best.bound_value = lagrangian_value(spec, lambda, budget);

  int stalled = 0;
  int step = 0;
  for (step = 1; step <= options.max_steps; ++step) {
    const Eigen::VectorXd g = bound_subgradient(spec, lambda, budget);
    lambda -= (scale / std::sqrt(static_cast<double>(step))) * g;
    lambda = lambda.cwiseMax(0.0).cwiseMin(box);

    const double value = lagrangian_value(spec, lambda, budget);
    if (value < best.bound_value - options.stall_tol) {
      best.bound_value = value;
      best.lambda_star = lambda;
      stalled = 0;
    } else if (++stalled >= options.stall_window) {
      break;
    }
  }
  best.iterations = std::min(step, options.max_steps);
  best.q_value = q_value(spec, best.lambda_star);
  return best;
}

BoundReport bound_from_lp(const SubProcessSpec& spec,
                          const BudgetProfile& budget) {
  BoundReport report;
  report.method = "lp_dual";
  report.lambda_star = multipliers_from_lp(spec, budget.fractions());
  report.q_value = q_value(spec, report.lambda_star);
  report.bound_value = lagrangian_value(spec, report.lambda_star, budget);
  report.iterations = 1;
  return report;
}

}  // namespace rmab
