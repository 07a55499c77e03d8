#include "rmab/dp.hpp"

#include <stdexcept>

namespace rmab {

namespace {
void check_dims(const SubProcessSpec& spec, const Multipliers& lambda) {
  if (lambda.size() != spec.horizon)
    throw std::invalid_argument("multiplier vector length != horizon");
}
}  // namespace

ValueTable backward_induction(const SubProcessSpec& spec,
                              const Multipliers& lambda) {
  check_dims(spec, lambda);
  const int n = spec.num_states;
  const int T = spec.horizon;
  ValueTable out;
  out.v = Eigen::MatrixXd::Zero(n, T + 1);
  for (int t = T - 1; t >= 0; --t) {
    const Eigen::VectorXd next = out.v.col(t + 1);
    const Eigen::VectorXd cont_active = spec.kernel_active * next;
    const Eigen::VectorXd cont_passive = spec.kernel_passive * next;
    for (int s = 0; s < n; ++s) {
      const double play = spec.reward[t](s, 1) - lambda[t] + cont_active[s];
      const double idle = spec.reward[t](s, 0) + cont_passive[s];
      out.v(s, t) = std::max(play, idle);
    }
  }
  return out;
}

double lookahead(const SubProcessSpec& spec, const Multipliers& lambda,
                 const ValueTable& values, int s, int a, int t) {
  const Eigen::MatrixXd& kernel =
      a == 1 ? spec.kernel_active : spec.kernel_passive;
  double cont = kernel.row(s).dot(values.v.col(t + 1));
  return spec.reward[t](s, a) - (a == 1 ? lambda[t] : 0.0) + cont;
}

RandomizedPolicy greedy_policy(const SubProcessSpec& spec,
                               const Multipliers& lambda,
                               const ValueTable& values) {
  const int n = spec.num_states;
  const int T = spec.horizon;
  RandomizedPolicy policy;
  policy.active = Eigen::MatrixXd::Zero(n, T);
  for (int t = 0; t < T; ++t)
    for (int s = 0; s < n; ++s) {
      const double play = lookahead(spec, lambda, values, s, 1, t);
      const double idle = lookahead(spec, lambda, values, s, 0, t);
      policy.active(s, t) = play >= idle - kTieEpsilon ? 1.0 : 0.0;
    }
  return policy;
}

RandomizedPolicy greedy_policy(const SubProcessSpec& spec,
                               const Multipliers& lambda) {
  return greedy_policy(spec, lambda, backward_induction(spec, lambda));
}

double q_value(const SubProcessSpec& spec, const Multipliers& lambda) {
  return backward_induction(spec, lambda).v(spec.initial_state, 0);
}

StateMarginals state_marginals(const SubProcessSpec& spec,
                               const RandomizedPolicy& policy) {
  const int n = spec.num_states;
  const int T = spec.horizon;
  StateMarginals out;
  out.p = Eigen::MatrixXd::Zero(n, T);
  out.p(spec.initial_state, 0) = 1.0;
  for (int t = 0; t + 1 < T; ++t) {
    const Eigen::VectorXd mass_active =
        out.p.col(t).cwiseProduct(policy.active.col(t));
    const Eigen::VectorXd mass_passive = out.p.col(t) - mass_active;
    out.p.col(t + 1) = spec.kernel_active.transpose() * mass_active +
                       spec.kernel_passive.transpose() * mass_passive;
  }
  return out;
}

Eigen::VectorXd activation_profile(const SubProcessSpec& spec,
                                   const RandomizedPolicy& policy) {
  const StateMarginals marginals = state_marginals(spec, policy);
  Eigen::VectorXd out(spec.horizon);
  for (int t = 0; t < spec.horizon; ++t)
    out[t] = marginals.p.col(t).dot(policy.active.col(t));
  return out;
}

double evaluate_policy(const SubProcessSpec& spec,
                       const RandomizedPolicy& policy,
                       const Multipliers& lambda) {
  check_dims(spec, lambda);
  const StateMarginals marginals = state_marginals(spec, policy);
  double total = 0;
  for (int t = 0; t < spec.horizon; ++t)
    for (int s = 0; s < spec.num_states; ++s) {
      const double q = policy.active(s, t);
      total += marginals.p(s, t) *
               (q * (spec.reward[t](s, 1) - lambda[t]) +
                (1.0 - q) * spec.reward[t](s, 0));
    }
  return total;
}

}  // namespace rmab
