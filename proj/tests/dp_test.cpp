#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "rmab/dp.hpp"
#include "test_util.hpp"

using namespace rmab;

TEST_CASE("one-state one-period backward induction") {
  const SubProcessSpec spec = testing::one_state_spec();
  Multipliers lambda(1);
  lambda << 0.4;
  CHECK(backward_induction(spec, lambda).v(0, 0) == doctest::Approx(0.6));
  CHECK(q_value(spec, lambda) == doctest::Approx(0.6));
  lambda << 2.0;
  CHECK(q_value(spec, lambda) == doctest::Approx(0.0));
}

TEST_CASE("backward induction matches exhaustive policy enumeration") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> lam(-0.5, 1.5);
  for (int trial = 0; trial < 10; ++trial) {
    const SubProcessSpec spec = testing::random_spec(rng, 3, 3);
    Multipliers lambda(3);
    for (int t = 0; t < 3; ++t) lambda[t] = lam(rng);
    const double brute = testing::exhaustive_policy_optimum(spec, lambda);
    CHECK(q_value(spec, lambda) == doctest::Approx(brute).epsilon(1e-10));
  }
}

TEST_CASE("greedy policy resolves exact ties to active") {
  SubProcessSpec spec = testing::one_state_spec();
  Multipliers lambda(1);
  lambda << 1.0;  // r(s,1) - lambda == r(s,0)
  const RandomizedPolicy policy = greedy_policy(spec, lambda);
  CHECK(policy.active(0, 0) == 1.0);
}

TEST_CASE("greedy policy goes passive above the reward bound") {
  std::mt19937_64 rng(5);
  const SubProcessSpec spec = testing::random_spec(rng, 3, 3);
  const double bound = spec.horizon * spec.max_reward();
  const Multipliers lambda = Multipliers::Constant(3, bound + 1.0);
  const RandomizedPolicy policy = greedy_policy(spec, lambda);
  CHECK(policy.active.maxCoeff() == 0.0);

  // Q(lambda) then equals the value of the never-pull policy.
  CHECK(q_value(spec, lambda) ==
        doctest::Approx(evaluate_policy(spec, policy, lambda))
            .epsilon(1e-12));
}

TEST_CASE("greedy policy value is self-consistent") {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> lam(-0.5, 1.5);
  for (int trial = 0; trial < 100; ++trial) {
    const SubProcessSpec spec = testing::random_spec(rng, 4, 4);
    Multipliers lambda(4);
    for (int t = 0; t < 4; ++t) lambda[t] = lam(rng);
    const RandomizedPolicy policy = greedy_policy(spec, lambda);
    const double gap =
        std::abs(evaluate_policy(spec, policy, lambda) -
                 q_value(spec, lambda));
    CHECK(gap < 1e-10);
  }
}

TEST_CASE("bellman residual vanishes everywhere") {
  std::mt19937_64 rng(44);
  const SubProcessSpec spec = testing::random_spec(rng, 4, 5);
  Multipliers lambda(5);
  std::uniform_real_distribution<double> lam(-0.5, 1.5);
  for (int t = 0; t < 5; ++t) lambda[t] = lam(rng);
  const ValueTable values = backward_induction(spec, lambda);
  for (int t = 0; t < 5; ++t)
    for (int s = 0; s < 4; ++s) {
      const double best = std::max(lookahead(spec, lambda, values, s, 1, t),
                                   lookahead(spec, lambda, values, s, 0, t));
      CHECK(std::abs(values.v(s, t) - best) < 1e-10);
    }
}

TEST_CASE("q_value is nonincreasing in each multiplier coordinate") {
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> lam(-0.5, 1.5);
  std::uniform_real_distribution<double> bump(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, 3);
  for (int trial = 0; trial < 50; ++trial) {
    const SubProcessSpec spec = testing::random_spec(rng, 3, 4);
    Multipliers lambda(4);
    for (int t = 0; t < 4; ++t) lambda[t] = lam(rng);
    Multipliers raised = lambda;
    raised[pick(rng)] += bump(rng);
    CHECK(q_value(spec, raised) <= q_value(spec, lambda) + 1e-12);
  }
}

TEST_CASE("state marginals under identity kernels are a point mass") {
  SubProcessSpec spec = testing::one_state_spec();
  spec.horizon = 3;
  spec.reward.assign(3, spec.reward[0]);
  RandomizedPolicy policy;
  policy.active = Eigen::MatrixXd::Ones(1, 3);
  const StateMarginals marginals = state_marginals(spec, policy);
  for (int t = 0; t < 3; ++t) CHECK(marginals.p(0, t) == 1.0);
}

TEST_CASE("two-state flip kernel alternates the point mass") {
  SubProcessSpec spec;
  spec.num_states = 2;
  spec.horizon = 4;
  spec.initial_state = 0;
  spec.kernel_active = Eigen::MatrixXd::Zero(2, 2);
  spec.kernel_active << 0, 1, 1, 0;
  spec.kernel_passive = Eigen::MatrixXd::Identity(2, 2);
  spec.reward.assign(4, Eigen::MatrixXd::Zero(2, 2));
  RandomizedPolicy policy;
  policy.active = Eigen::MatrixXd::Ones(2, 4);
  const StateMarginals marginals = state_marginals(spec, policy);
  for (int t = 0; t < 4; ++t) {
    CHECK(marginals.p(t % 2, t) == 1.0);
    CHECK(marginals.p(1 - t % 2, t) == 0.0);
  }
}

TEST_CASE("marginals agree with a Monte-Carlo estimate") {
  std::mt19937_64 rng(66);
  const SubProcessSpec spec = testing::random_spec(rng, 3, 3);
  RandomizedPolicy policy;
  policy.active = Eigen::MatrixXd::Zero(3, 3);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  for (int t = 0; t < 3; ++t)
    for (int s = 0; s < 3; ++s) policy.active(s, t) = uniform(rng);

  const int paths = 1'000'000;
  Eigen::MatrixXd hits = Eigen::MatrixXd::Zero(3, 3);
  for (int p = 0; p < paths; ++p) {
    int s = spec.initial_state;
    for (int t = 0; t < 3; ++t) {
      hits(s, t) += 1.0;
      const bool active = uniform(rng) < policy.active(s, t);
      const auto& kernel = active ? spec.kernel_active : spec.kernel_passive;
      const double u = uniform(rng);
      double acc = 0;
      for (int sp = 0; sp < 3; ++sp) {
        acc += kernel(s, sp);
        if (u < acc) {
          s = sp;
          break;
        }
      }
    }
  }
  hits /= paths;
  const StateMarginals marginals = state_marginals(spec, policy);
  for (int t = 0; t < 3; ++t) {
    CHECK(std::abs(marginals.p.col(t).sum() - 1.0) < 1e-10);
    for (int s = 0; s < 3; ++s) {
      const double p = marginals.p(s, t);
      const double se = std::sqrt(std::max(p * (1 - p), 1e-12) / paths);
      CHECK(std::abs(hits(s, t) - p) < 3 * se + 1e-9);
    }
  }
}

TEST_CASE("activation profile endpoints") {
  std::mt19937_64 rng(77);
  const SubProcessSpec spec = testing::random_spec(rng, 3, 3);
  RandomizedPolicy always, never;
  always.active = Eigen::MatrixXd::Ones(3, 3);
  never.active = Eigen::MatrixXd::Zero(3, 3);
  CHECK(activation_profile(spec, always).minCoeff() == 1.0);
  CHECK(activation_profile(spec, never).maxCoeff() == 0.0);
}

TEST_CASE("evaluate_policy of the never-active policy unwinds directly") {
  std::mt19937_64 rng(88);
  const SubProcessSpec spec = testing::random_spec(rng, 3, 3);
  RandomizedPolicy never;
  never.active = Eigen::MatrixXd::Zero(3, 3);
  const StateMarginals marginals = state_marginals(spec, never);
  double expected = 0;
  for (int t = 0; t < 3; ++t)
    for (int s = 0; s < 3; ++s)
      expected += marginals.p(s, t) * spec.reward[t](s, 0);
  CHECK(evaluate_policy(spec, never, Multipliers::Zero(3)) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("no policy beats the backward-induction value") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const SubProcessSpec spec = testing::random_spec(rng, 3, 3);
    const Multipliers lambda = Multipliers::Zero(3);
    RandomizedPolicy policy;
    policy.active = Eigen::MatrixXd::Zero(3, 3);
    for (int t = 0; t < 3; ++t)
      for (int s = 0; s < 3; ++s)
        policy.active(s, t) = uniform(rng) < 0.5 ? 1.0 : 0.0;
    CHECK(evaluate_policy(spec, policy, lambda) <=
          q_value(spec, lambda) + 1e-10);
  }
}
