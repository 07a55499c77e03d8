#include "rmab/lp.hpp"

#include <stdexcept>

namespace rmab {

int occupation_variable(const SubProcessSpec& spec, int s, int a, int t) {
  return (t * spec.num_states + s) * 2 + a;
}

LinearProgram build_occupation_lp(const SubProcessSpec& spec,
                                  const Multipliers& lambda_star,
                                  const Eigen::VectorXd& alpha) {
  const int n = spec.num_states;
  const int T = spec.horizon;
  if (lambda_star.size() != T || alpha.size() != T)
    throw std::invalid_argument("lambda/alpha length != horizon");

  const int num_vars = 2 * n * T;
  const int num_rows = T + n + n * (T - 1);
  LinearProgram lp;
  lp.objective = Eigen::VectorXd::Zero(num_vars);
  lp.rows = Eigen::MatrixXd::Zero(num_rows, num_vars);
  lp.rhs = Eigen::VectorXd::Zero(num_rows);

  for (int t = 0; t < T; ++t)
    for (int s = 0; s < n; ++s) {
      lp.objective[occupation_variable(spec, s, 0, t)] = spec.reward[t](s, 0);
      lp.objective[occupation_variable(spec, s, 1, t)] =
          spec.reward[t](s, 1) - lambda_star[t];
    }

  // Budget rows first so their duals are addressable by period.
  for (int t = 0; t < T; ++t) {
    for (int s = 0; s < n; ++s)
      lp.rows(t, occupation_variable(spec, s, 1, t)) = 1.0;
    lp.rhs[t] = alpha[t];
  }
  // Initial-distribution rows.
  for (int s = 0; s < n; ++s) {
    const int row = T + s;
    lp.rows(row, occupation_variable(spec, s, 0, 0)) = 1.0;
    lp.rows(row, occupation_variable(spec, s, 1, 0)) = 1.0;
    lp.rhs[row] = s == spec.initial_state ? 1.0 : 0.0;
  }
  // Flow-balance rows for t >= 2 (0-based t >= 1).
  for (int t = 1; t < T; ++t)
    for (int s = 0; s < n; ++s) {
      const int row = T + n + (t - 1) * n + s;
      lp.rows(row, occupation_variable(spec, s, 0, t)) = 1.0;
      lp.rows(row, occupation_variable(spec, s, 1, t)) = 1.0;
      for (int sp = 0; sp < n; ++sp) {
        lp.rows(row, occupation_variable(spec, sp, 0, t - 1)) -=
            spec.kernel_passive(sp, s);
        lp.rows(row, occupation_variable(spec, sp, 1, t - 1)) -=
            spec.kernel_active(sp, s);
      }
    }
  return lp;
}

OccupationSolution solve_occupation(const SubProcessSpec& spec,
                                    const Multipliers& lambda_star,
                                    const Eigen::VectorXd& alpha) {
  OccupationSolution out;
  out.lp = simplex_solve(build_occupation_lp(spec, lambda_star, alpha));
  if (out.lp.status != LpStatus::kOptimal)
    throw std::runtime_error("occupation LP did not solve to optimality");
  const int n = spec.num_states;
  const int T = spec.horizon;
  out.rho.active = Eigen::MatrixXd::Zero(n, T);
  out.rho.passive = Eigen::MatrixXd::Zero(n, T);
  for (int t = 0; t < T; ++t)
    for (int s = 0; s < n; ++s) {
      out.rho.active(s, t) =
          std::max(0.0, out.lp.primal[occupation_variable(spec, s, 1, t)]);
      out.rho.passive(s, t) =
          std::max(0.0, out.lp.primal[occupation_variable(spec, s, 0, t)]);
    }
  return out;
}

RandomizedPolicy extract_policy(const OccupationMeasure& rho,
                                const IndexTable& indices,
                                const Multipliers& lambda_star) {
  const int n = static_cast<int>(rho.active.rows());
  const int T = static_cast<int>(rho.active.cols());
  RandomizedPolicy policy;
  policy.active = Eigen::MatrixXd::Zero(n, T);
  for (int t = 0; t < T; ++t)
    for (int s = 0; s < n; ++s) {
      const double mass = rho.mass(s, t);
      if (mass > kMassFloor)
        policy.active(s, t) = rho.active(s, t) / mass;
      else
        policy.active(s, t) = indices.beta(s, t) >= lambda_star[t] ? 1.0 : 0.0;
    }
  return policy;
}

Multipliers multipliers_from_lp(const SubProcessSpec& spec,
                                const Eigen::VectorXd& alpha) {
  const Multipliers zero = Multipliers::Zero(spec.horizon);
  const LpSolution sol = simplex_solve(build_occupation_lp(spec, zero, alpha));
  if (sol.status != LpStatus::kOptimal)
    throw std::runtime_error("multiplier LP did not solve to optimality");
  return sol.dual.head(spec.horizon);
}

}  // namespace rmab
