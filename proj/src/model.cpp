#include "rmab/model.hpp"

#include <nlohmann/json.hpp>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace rmab {

namespace {
constexpr double kRowSumTol = 1e-12;
}

double SubProcessSpec::max_reward() const {
  double r = 0;
  for (const auto& rt : reward) r = std::max(r, rt.maxCoeff());
  return r;
}

Eigen::VectorXd BudgetProfile::fractions() const {
  return budgets.cast<double>() / static_cast<double>(num_arms);
}

std::vector<std::string> validate(const SubProcessSpec& spec) {
  std::vector<std::string> out;
  auto add = [&out](const std::string& msg) { out.push_back(msg); };

  if (spec.num_states < 1) add("num_states must be >= 1");
  if (spec.horizon < 1) add("horizon must be >= 1");
  if (spec.initial_state < 0 || spec.initial_state >= spec.num_states)
    add("initial_state out of range");
  if (static_cast<int>(spec.reward.size()) != spec.horizon)
    add("reward table must have one entry per period");

  const int n = spec.num_states;
  for (int t = 0; t < static_cast<int>(spec.reward.size()); ++t) {
    const auto& rt = spec.reward[t];
    if (rt.rows() != n || rt.cols() != 2) {
      std::ostringstream ss;
      ss << "reward[" << t << "] has shape " << rt.rows() << "x" << rt.cols();
      add(ss.str());
      continue;
    }
    for (int s = 0; s < n; ++s)
      for (int a = 0; a < 2; ++a) {
        const double r = rt(s, a);
        if (!std::isfinite(r) || r < 0) {
          std::ostringstream ss;
          ss << "reward[t=" << t << "][s=" << s << "][a=" << a
             << "] = " << r << " is not finite and nonnegative";
          add(ss.str());
        }
      }
  }

  auto check_kernel = [&](const Eigen::MatrixXd& kernel, const char* name) {
    if (kernel.rows() != n || kernel.cols() != n) {
      add(std::string(name) + " has wrong shape");
      return;
    }
    for (int s = 0; s < n; ++s) {
      double row_sum = 0;
      for (int sp = 0; sp < n; ++sp) {
        const double p = kernel(s, sp);
        if (!(p >= 0.0 && p <= 1.0)) {
          std::ostringstream ss;
          ss << name << "[" << s << "][" << sp << "] = " << p
             << " outside [0,1]";
          add(ss.str());
        }
        row_sum += p;
      }
      if (std::abs(row_sum - 1.0) > kRowSumTol) {
        std::ostringstream ss;
        ss << name << " row " << s << " sums to " << row_sum;
        add(ss.str());
      }
    }
  };
  check_kernel(spec.kernel_active, "kernel_active");
  check_kernel(spec.kernel_passive, "kernel_passive");
  return out;
}

int BernoulliLatticeSpec::state_of(int a, int b) const {
  for (int s = 0; s < static_cast<int>(states.size()); ++s)
    if (states[s].alpha == a && states[s].beta == b) return s;
  return -1;
}

namespace {

// Enumerates the posterior lattice {(a,b): a>=a0, b>=b0, a+b <= a0+b0+depth}
// and fills kernels/metadata shared by both problem builders.
BernoulliLatticeSpec build_lattice(int horizon, int prior_a, int prior_b,
                                   int depth) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (prior_a < 1 || prior_b < 1)
    throw std::invalid_argument("prior parameters must be positive integers");

  BernoulliLatticeSpec out;
  std::map<std::pair<int, int>, int> id;
  const int max_sum = prior_a + prior_b + depth;
  for (int sum = prior_a + prior_b; sum <= max_sum; ++sum)
    for (int a = prior_a; a <= sum - prior_b; ++a) {
      id[{a, sum - a}] = static_cast<int>(out.states.size());
      out.states.push_back({a, sum - a});
    }

  const int n = static_cast<int>(out.states.size());
  auto& spec = out.spec;
  spec.num_states = n;
  spec.horizon = horizon;
  spec.initial_state = id.at({prior_a, prior_b});
  spec.kernel_active = Eigen::MatrixXd::Zero(n, n);
  spec.kernel_passive = Eigen::MatrixXd::Identity(n, n);
  out.success_state.assign(n, BernoulliLatticeSpec::kSampleReward);

  for (int s = 0; s < n; ++s) {
    const auto [a, b] = std::pair(out.states[s].alpha, out.states[s].beta);
    const double mean = static_cast<double>(a) / (a + b);
    auto succ = id.find({a + 1, b});
    if (succ == id.end()) {
      // Frontier state: only reachable in the final period, where the
      // transition is never used. Self-loop keeps the row stochastic.
      spec.kernel_active(s, s) = 1.0;
    } else {
      spec.kernel_active(s, succ->second) = mean;
      spec.kernel_active(s, id.at({a, b + 1})) = 1.0 - mean;
      out.success_state[s] = succ->second;
    }
  }
  return out;
}

}  // namespace

BernoulliLatticeSpec build_bernoulli_mab(int horizon, int prior_a,
                                         int prior_b) {
  BernoulliLatticeSpec out =
      build_lattice(horizon, prior_a, prior_b, horizon - 1);
  const int n = out.spec.num_states;
  out.spec.reward.assign(out.spec.horizon, Eigen::MatrixXd::Zero(n, 2));
  for (auto& rt : out.spec.reward)
    for (int s = 0; s < n; ++s)
      rt(s, 1) = static_cast<double>(out.states[s].alpha) /
                 (out.states[s].alpha + out.states[s].beta);
  return out;
}

BudgetProfile SubsetSelectionSpec::budget_for(int num_arms) const {
  BudgetProfile bp;
  bp.num_arms = num_arms;
  bp.budgets.resize(measure_horizon + 1);
  for (int t = 0; t < measure_horizon; ++t)
    bp.budgets[t] = static_cast<int>(std::floor(measure_fraction * num_arms));
  bp.budgets[measure_horizon] =
      static_cast<int>(std::floor(select_fraction * num_arms));
  return bp;
}

Eigen::VectorXd SubsetSelectionSpec::alpha() const {
  Eigen::VectorXd a(measure_horizon + 1);
  a.setConstant(measure_fraction);
  a[measure_horizon] = select_fraction;
  return a;
}

SubsetSelectionSpec build_subset_selection(int measure_horizon,
                                           double select_fraction,
                                           double measure_fraction,
                                           int prior_a, int prior_b) {
  if (select_fraction <= 0 || select_fraction >= 1 || measure_fraction <= 0 ||
      measure_fraction >= 1)
    throw std::invalid_argument("fractions must lie in (0,1)");

  SubsetSelectionSpec out;
  out.lattice =
      build_lattice(measure_horizon + 1, prior_a, prior_b, measure_horizon);
  out.measure_horizon = measure_horizon;
  out.select_fraction = select_fraction;
  out.measure_fraction = measure_fraction;

  auto& spec = out.lattice.spec;
  const int n = spec.num_states;
  spec.reward.assign(spec.horizon, Eigen::MatrixXd::Zero(n, 2));
  for (int s = 0; s < n; ++s)
    spec.reward[measure_horizon](s, 1) =
        static_cast<double>(out.lattice.states[s].alpha) /
        (out.lattice.states[s].alpha + out.lattice.states[s].beta);
  return out;
}

nlohmann::json to_json(const SubProcessSpec& spec) {
  nlohmann::json doc;
  doc["num_states"] = spec.num_states;
  doc["horizon"] = spec.horizon;
  doc["initial_state"] = spec.initial_state;
  auto matrix_rows = [](const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < m.rows(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
      rows.push_back(std::move(row));
    }
    return rows;
  };
  nlohmann::json reward = nlohmann::json::array();
  for (const auto& rt : spec.reward) reward.push_back(matrix_rows(rt));
  doc["reward"] = std::move(reward);
  doc["kernel_active"] = matrix_rows(spec.kernel_active);
  doc["kernel_passive"] = matrix_rows(spec.kernel_passive);
  return doc;
}

SubProcessSpec spec_from_json(const nlohmann::json& doc) {
  SubProcessSpec spec;
  spec.num_states = doc.at("num_states").get<int>();
  spec.horizon = doc.at("horizon").get<int>();
  spec.initial_state = doc.at("initial_state").get<int>();
  auto read_matrix = [](const nlohmann::json& rows) {
    const int r = static_cast<int>(rows.size());
    const int c = r > 0 ? static_cast<int>(rows.at(0).size()) : 0;
    Eigen::MatrixXd m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = rows.at(i).at(j).get<double>();
    return m;
  };
  for (const auto& rt : doc.at("reward")) spec.reward.push_back(read_matrix(rt));
  spec.kernel_active = read_matrix(doc.at("kernel_active"));
  spec.kernel_passive = read_matrix(doc.at("kernel_passive"));
  return spec;
}

}  // namespace rmab
