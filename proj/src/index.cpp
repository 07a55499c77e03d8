#include "rmab/index.hpp"

namespace rmab {

namespace {

// Activation test against continuation values computed once under lambda*.
// Replacing lambda_t by the trial price leaves every value from t+1 onward
// unchanged, so only the period-t lookahead needs the substituted price.
bool active_against(const SubProcessSpec& spec, const ValueTable& base_values,
                    int s, int t, double trial_price) {
  const Eigen::VectorXd next = base_values.v.col(t + 1);
  const double play =
      spec.reward[t](s, 1) - trial_price + spec.kernel_active.row(s).dot(next);
  const double idle =
      spec.reward[t](s, 0) + spec.kernel_passive.row(s).dot(next);
  return play >= idle - kTieEpsilon;
}

double bisect_index(const SubProcessSpec& spec, const ValueTable& base_values,
                    int s, int t, double bound, double tol) {
  if (active_against(spec, base_values, s, t, bound)) return bound;
  if (!active_against(spec, base_values, s, t, -bound)) return -bound;
  double lo = -bound;  // active
  double hi = bound;   // inactive
  for (int iter = 0; iter < 60 && hi - lo > tol; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (active_against(spec, base_values, s, t, mid))
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

}  // namespace

bool active_at(const SubProcessSpec& spec, const Multipliers& lambda_star,
               int s, int t, double trial_price) {
  Multipliers probe = lambda_star;
  probe[t] = trial_price;
  const ValueTable values = backward_induction(spec, probe);
  return active_against(spec, values, s, t, trial_price);
}

double compute_index(const SubProcessSpec& spec,
                     const Multipliers& lambda_star, int s, int t,
                     double tol) {
  const double bound = spec.horizon * spec.max_reward();
  const ValueTable values = backward_induction(spec, lambda_star);
  return bisect_index(spec, values, s, t, bound, tol);
}

IndexTable index_table(const SubProcessSpec& spec,
                       const Multipliers& lambda_star, double tol) {
  IndexTable out;
  out.lambda_star = lambda_star;
  out.search_bound = spec.horizon * spec.max_reward();
  out.beta = Eigen::MatrixXd::Zero(spec.num_states, spec.horizon);
  const ValueTable values = backward_induction(spec, lambda_star);
  for (int t = 0; t < spec.horizon; ++t)
    for (int s = 0; s < spec.num_states; ++s)
      out.beta(s, t) = bisect_index(spec, values, s, t, out.search_bound, tol);
  return out;
}

}  // namespace rmab
