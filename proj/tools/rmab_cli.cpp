// Experiment runner: `solve` precomputes the multipliers, indices, and the
// randomized single-arm policy for one budget profile; `simulate` replays
// them across system sizes against the baselines; `verify` runs built-in
// oracle suites.
//
// Exit codes: 0 success, 2 invalid configuration, 3 solver failure,
// 4 config/bundle hash mismatch, 1 verification failure.

#include <CLI11.hpp>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "rmab/index.hpp"
#include "rmab/lp.hpp"
#include "rmab/model.hpp"
#include "rmab/oracles.hpp"
#include "rmab/policy.hpp"
#include "rmab/relax.hpp"
#include "rmab/sim.hpp"

namespace {

using nlohmann::json;
using namespace rmab;

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitHash = 4;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Tolerances {
  double bisection = kDefaultIndexTol;
  double lp = 1e-8;
  int subgradient_steps = 2000;
};

struct ExperimentConfig {
  std::string problem;  // bernoulli_mab | subset_selection | custom
  int horizon = 0;
  Eigen::VectorXd fractions;  // per-period alpha_t
  double select_fraction = 0, measure_fraction = 0;  // subset_selection
  std::string spec_path;                             // custom
  std::vector<int> k_list;
  int replications = 1;
  std::vector<std::string> policies;
  std::uint64_t seed = 0;
  std::string lambda_method = "lp_dual";
  Tolerances tol;

  json raw;  // canonical parsed document, hashed for bundle pairing
};

void require_keys(const json& doc, const std::set<std::string>& allowed,
                  const std::string& where) {
  for (const auto& [key, value] : doc.items())
    if (!allowed.count(key))
      throw ConfigError("unknown key \"" + key + "\" in " + where);
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }

  require_keys(doc,
               {"problem", "horizon", "fraction", "fractions",
                "select_fraction", "measure_fraction", "spec_path", "K_list",
                "replications", "policies", "seed", "lambda_method",
                "tolerances"},
               "config");

  ExperimentConfig cfg;
  cfg.raw = doc;
  try {
    cfg.problem = doc.at("problem").get<std::string>();
    if (cfg.problem != "bernoulli_mab" && cfg.problem != "subset_selection" &&
        cfg.problem != "custom")
      throw ConfigError("problem must be bernoulli_mab, subset_selection, or "
                        "custom");

    cfg.horizon = doc.at("horizon").get<int>();
    if (cfg.horizon < 1) throw ConfigError("horizon must be >= 1");

    if (cfg.problem == "subset_selection") {
      cfg.select_fraction = doc.at("select_fraction").get<double>();
      cfg.measure_fraction = doc.at("measure_fraction").get<double>();
      if (doc.contains("fraction") || doc.contains("fractions"))
        throw ConfigError(
            "subset_selection takes select_fraction/measure_fraction, not "
            "fraction(s)");
    } else {
      const int periods = cfg.horizon;
      if (doc.contains("fractions")) {
        const auto values = doc.at("fractions").get<std::vector<double>>();
        if (static_cast<int>(values.size()) != periods)
          throw ConfigError("fractions length must equal horizon");
        cfg.fractions = Eigen::Map<const Eigen::VectorXd>(
            values.data(), static_cast<int>(values.size()));
      } else {
        cfg.fractions = Eigen::VectorXd::Constant(
            periods, doc.at("fraction").get<double>());
      }
    }
    for (int t = 0; t < cfg.fractions.size(); ++t)
      if (cfg.fractions[t] <= 0 || cfg.fractions[t] >= 1)
        throw ConfigError("every fraction must lie in (0,1)");
    if (cfg.problem == "subset_selection" &&
        (cfg.select_fraction <= 0 || cfg.select_fraction >= 1 ||
         cfg.measure_fraction <= 0 || cfg.measure_fraction >= 1))
      throw ConfigError("every fraction must lie in (0,1)");

    if (cfg.problem == "custom")
      cfg.spec_path = doc.at("spec_path").get<std::string>();

    cfg.k_list = doc.at("K_list").get<std::vector<int>>();
    if (cfg.k_list.empty()) throw ConfigError("K_list must be nonempty");
    for (int k : cfg.k_list)
      if (k < 2) throw ConfigError("every K must be >= 2");

    cfg.replications = doc.at("replications").get<int>();
    if (cfg.replications < 1) throw ConfigError("replications must be >= 1");

    cfg.policies = doc.at("policies").get<std::vector<std::string>>();
    if (cfg.policies.empty()) throw ConfigError("policies must be nonempty");
    for (const auto& p : cfg.policies)
      if (p != "index" && p != "ucb" && p != "ocba_m")
        throw ConfigError("unknown policy \"" + p + "\"");

    cfg.seed = doc.at("seed").get<std::uint64_t>();

    if (doc.contains("lambda_method")) {
      cfg.lambda_method = doc.at("lambda_method").get<std::string>();
      if (cfg.lambda_method != "lp_dual" && cfg.lambda_method != "subgradient")
        throw ConfigError("lambda_method must be lp_dual or subgradient");
    }

    if (doc.contains("tolerances")) {
      const json& tol = doc.at("tolerances");
      require_keys(tol, {"bisection", "lp", "subgradient_steps"},
                   "tolerances");
      if (tol.contains("bisection"))
        cfg.tol.bisection = tol.at("bisection").get<double>();
      if (tol.contains("lp")) cfg.tol.lp = tol.at("lp").get<double>();
      if (tol.contains("subgradient_steps"))
        cfg.tol.subgradient_steps = tol.at("subgradient_steps").get<int>();
      if (cfg.tol.bisection <= 0 || cfg.tol.lp <= 0 ||
          cfg.tol.subgradient_steps < 1)
        throw ConfigError("tolerances must be positive");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config field error: ") + e.what());
  }
  return cfg;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t hash = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  return fnv1a(cfg.raw.dump());
}

std::string fmt17(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

// The instance the solve stage works on: one arm spec plus the per-period
// budget fractions; lattice metadata present for Bernoulli problems.
struct Instance {
  SubProcessSpec spec;
  Eigen::VectorXd alpha;
  std::vector<int> success_state;
  RewardRealization realization = RewardRealization::kExpected;
};

Instance build_instance(const ExperimentConfig& cfg) {
  Instance inst;
  if (cfg.problem == "bernoulli_mab") {
    BernoulliLatticeSpec mab = build_bernoulli_mab(cfg.horizon, 1, 1);
    inst.spec = std::move(mab.spec);
    inst.success_state = std::move(mab.success_state);
    inst.alpha = cfg.fractions;
    inst.realization = RewardRealization::kBernoulli;
  } else if (cfg.problem == "subset_selection") {
    SubsetSelectionSpec problem = build_subset_selection(
        cfg.horizon, cfg.select_fraction, cfg.measure_fraction);
    inst.alpha = problem.alpha();
    inst.spec = std::move(problem.lattice.spec);
    inst.success_state = std::move(problem.lattice.success_state);
    inst.realization = RewardRealization::kExpected;
  } else {
    std::ifstream in(cfg.spec_path);
    if (!in) throw ConfigError("cannot open spec_path: " + cfg.spec_path);
    json doc;
    try {
      doc = json::parse(in);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("spec_path is not valid JSON: ") +
                        e.what());
    }
    inst.spec = spec_from_json(doc);
    const auto violations = validate(inst.spec);
    if (!violations.empty())
      throw ConfigError("invalid custom spec: " + violations.front());
    if (inst.spec.horizon != cfg.horizon)
      throw ConfigError("custom spec horizon disagrees with config horizon");
    inst.alpha = cfg.fractions;
  }
  return inst;
}

BudgetProfile budget_for(const Instance& inst, int num_arms) {
  BudgetProfile budget;
  budget.num_arms = num_arms;
  budget.budgets = Eigen::VectorXi::Zero(inst.spec.horizon);
  for (int t = 0; t < inst.spec.horizon; ++t) {
    const long m = std::lround(inst.alpha[t] * num_arms);
    budget.budgets[t] =
        static_cast<int>(std::clamp<long>(m, 1, num_arms - 1));
  }
  return budget;
}

struct SolvedArtifacts {
  Multipliers lambda;
  BoundReport bound;  // per-arm content: bound_value for K=1-normalized use
  OccupationMeasure rho;
  IndexTable indices;
  RandomizedPolicy policy;
};

SolvedArtifacts solve_pipeline(const Instance& inst,
                               const ExperimentConfig& cfg) {
  SolvedArtifacts art;
  // A reference budget: the bound scales per arm as Q(lambda*) + sum_t
  // alpha_t lambda*_t independent of K, so any consistent K works here.
  if (cfg.lambda_method == "subgradient") {
    BudgetProfile ref;
    ref.num_arms = 1;
    ref.budgets = Eigen::VectorXi::Ones(inst.spec.horizon);
    SubgradientOptions options;
    options.max_steps = cfg.tol.subgradient_steps;
    // Fractional budgets are expressed through alpha directly.
    BoundReport report;
    {
      // Minimize Q(lambda) + alpha . lambda by treating alpha as a
      // per-arm budget profile.
      Multipliers lambda =
          Multipliers::Zero(inst.spec.horizon);
      const double bar = inst.spec.horizon * inst.spec.max_reward();
      const double scale =
          options.step_scale > 0 ? options.step_scale : bar / 10;
      Multipliers best = lambda;
      double best_value = q_value(inst.spec, lambda) +
                          inst.alpha.dot(lambda);
      int since_improved = 0;
      int k = 0;
      for (; k < options.max_steps; ++k) {
        const RandomizedPolicy greedy = greedy_policy(inst.spec, lambda);
        const Eigen::VectorXd g =
            inst.alpha - activation_profile(inst.spec, greedy);
        lambda -= (scale / std::sqrt(k + 1.0)) * g;
        lambda = lambda.cwiseMax(0.0).cwiseMin(bar);
        const double value =
            q_value(inst.spec, lambda) + inst.alpha.dot(lambda);
        if (value < best_value - options.stall_tol) {
          best_value = value;
          best = lambda;
          since_improved = 0;
        } else if (++since_improved >= options.stall_window) {
          ++k;
          break;
        }
      }
      report.lambda_star = best;
      report.q_value = q_value(inst.spec, best);
      report.bound_value = best_value;
      report.method = "subgradient";
      report.iterations = k;
    }
    art.bound = report;
  } else {
    art.bound.lambda_star = multipliers_from_lp(inst.spec, inst.alpha);
    art.bound.q_value = q_value(inst.spec, art.bound.lambda_star);
    art.bound.bound_value =
        art.bound.q_value + inst.alpha.dot(art.bound.lambda_star);
    art.bound.method = "lp_dual";
    art.bound.iterations = 1;
  }
  art.lambda = art.bound.lambda_star;

  const OccupationSolution occ =
      solve_occupation(inst.spec, art.lambda, inst.alpha);
  if (occ.lp.status != LpStatus::kOptimal)
    throw SolverError("occupation LP did not reach an optimal vertex");
  art.rho = occ.rho;
  art.indices = index_table(inst.spec, art.lambda, cfg.tol.bisection);
  art.policy = extract_policy(art.rho, art.indices, art.lambda);
  return art;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& doc) {
  const int rows = static_cast<int>(doc.size());
  const int cols = rows == 0 ? 0 : static_cast<int>(doc.at(0).size());
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = doc.at(i).at(j).get<double>();
  return m;
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  out << body;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

int cmd_solve(const std::string& config_path, const std::string& out_dir) {
  const ExperimentConfig cfg = parse_config(config_path);
  const Instance inst = build_instance(cfg);
  const SolvedArtifacts art = solve_pipeline(inst, cfg);
  const std::uint64_t hash = config_hash(cfg);

  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);

  json lambda_doc;
  lambda_doc["config_hash"] = hash;
  lambda_doc["seed"] = cfg.seed;
  lambda_doc["method"] = art.bound.method;
  lambda_doc["iterations"] = art.bound.iterations;
  lambda_doc["q_value"] = art.bound.q_value;
  lambda_doc["bound_per_arm"] = art.bound.bound_value;
  lambda_doc["alpha"] = std::vector<double>(
      inst.alpha.data(), inst.alpha.data() + inst.alpha.size());
  lambda_doc["lambda_star"] = std::vector<double>(
      art.lambda.data(), art.lambda.data() + art.lambda.size());
  write_file(dir / "lambda.json", lambda_doc.dump(2) + "\n");

  std::string csv = "state,t,beta\n";
  for (int s = 0; s < inst.spec.num_states; ++s)
    for (int t = 0; t < inst.spec.horizon; ++t)
      csv += std::to_string(s) + "," + std::to_string(t + 1) + "," +
             fmt17(art.indices.beta(s, t)) + "\n";
  write_file(dir / "indices.csv", csv);

  json occupation_doc;
  occupation_doc["config_hash"] = hash;
  occupation_doc["seed"] = cfg.seed;
  occupation_doc["rho_active"] = matrix_to_json(art.rho.active);
  occupation_doc["rho_passive"] = matrix_to_json(art.rho.passive);
  occupation_doc["policy_active"] = matrix_to_json(art.policy.active);
  occupation_doc["search_bound"] = art.indices.search_bound;
  write_file(dir / "occupation.json", occupation_doc.dump(2) + "\n");
  return 0;
}

SolvedArtifacts load_bundle(const std::filesystem::path& dir,
                            std::uint64_t expected_hash) {
  auto load = [&](const char* name) {
    std::ifstream in(dir / name);
    if (!in)
      throw SolverError(std::string("bundle file missing: ") + name);
    return json::parse(in);
  };
  const json lambda_doc = load("lambda.json");
  const json occupation_doc = load("occupation.json");
  if (lambda_doc.at("config_hash").get<std::uint64_t>() != expected_hash ||
      occupation_doc.at("config_hash").get<std::uint64_t>() != expected_hash)
    throw ConfigError("bundle hash mismatch");

  SolvedArtifacts art;
  const auto lambda = lambda_doc.at("lambda_star").get<std::vector<double>>();
  art.lambda = Eigen::Map<const Eigen::VectorXd>(
      lambda.data(), static_cast<int>(lambda.size()));
  art.bound.lambda_star = art.lambda;
  art.bound.q_value = lambda_doc.at("q_value").get<double>();
  art.bound.bound_value = lambda_doc.at("bound_per_arm").get<double>();
  art.bound.method = lambda_doc.at("method").get<std::string>();
  art.rho.active = matrix_from_json(occupation_doc.at("rho_active"));
  art.rho.passive = matrix_from_json(occupation_doc.at("rho_passive"));
  art.policy.active = matrix_from_json(occupation_doc.at("policy_active"));
  art.indices.lambda_star = art.lambda;
  art.indices.search_bound = occupation_doc.at("search_bound").get<double>();

  // Rebuild the index table from its CSV form.
  std::ifstream csv(dir / "indices.csv");
  if (!csv) throw SolverError("bundle file missing: indices.csv");
  art.indices.beta = Eigen::MatrixXd::Zero(art.policy.active.rows(),
                                           art.policy.active.cols());
  std::string line;
  std::getline(csv, line);  // header
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string cell;
    std::getline(fields, cell, ',');
    const int s = std::stoi(cell);
    std::getline(fields, cell, ',');
    const int t = std::stoi(cell) - 1;
    std::getline(fields, cell, ',');
    art.indices.beta(s, t) = std::stod(cell);
  }
  return art;
}

std::uint64_t policy_seed(std::uint64_t master, const std::string& policy,
                          int num_arms) {
  return fnv1a(policy + "/" + std::to_string(num_arms) + "/" +
               std::to_string(master));
}

double pretrain_subset_width(const SubsetSelectionSpec& problem, int num_arms,
                             const std::vector<double>& grid, int reps,
                             std::uint64_t seed) {
  double best_width = grid.front();
  double best_mean = -1e300;
  for (const double width : grid) {
    const SimResult result =
        simulate_ucb_subset(problem, num_arms, width, reps, seed);
    if (result.mean_per_arm > best_mean) {
      best_mean = result.mean_per_arm;
      best_width = width;
    }
  }
  return best_width;
}

int cmd_simulate(const std::string& config_path, const std::string& bundle_dir,
                 const std::string& out_dir) {
  const ExperimentConfig cfg = parse_config(config_path);
  const Instance inst = build_instance(cfg);
  const SolvedArtifacts art =
      load_bundle(bundle_dir, config_hash(cfg));

  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(0.25 * i);
  const int train_reps = std::min(cfg.replications, 1000);

  std::string csv = "policy,K,reps,mean_per_arm,ci_half,bound_per_arm,seed\n";
  for (const std::string& policy : cfg.policies) {
    for (const int num_arms : cfg.k_list) {
      const BudgetProfile budget = budget_for(inst, num_arms);
      const std::uint64_t seed = policy_seed(cfg.seed, policy, num_arms);
      SimResult result;
      if (policy == "index") {
        result = simulate_index_policy(inst.spec, budget, art.indices,
                                       art.rho, inst.success_state,
                                       inst.realization, cfg.replications,
                                       seed);
      } else if (policy == "ucb") {
        if (cfg.problem == "subset_selection") {
          SubsetSelectionSpec problem = build_subset_selection(
              cfg.horizon, cfg.select_fraction, cfg.measure_fraction);
          const double width = pretrain_subset_width(
              problem, num_arms, grid, train_reps, seed ^ 0x747261696eULL);
          result = simulate_ucb_subset(problem, num_arms, width,
                                       cfg.replications, seed);
        } else if (cfg.problem == "bernoulli_mab") {
          const double width = pretrain_ucb_width(cfg.horizon, budget, grid,
                                                  train_reps, seed);
          result = simulate_ucb_mab(cfg.horizon, budget, width,
                                    cfg.replications, seed);
        } else {
          throw ConfigError("ucb baseline requires a bernoulli problem");
        }
      } else {  // ocba_m
        if (cfg.problem != "subset_selection")
          throw ConfigError("ocba_m baseline requires subset_selection");
        SubsetSelectionSpec problem = build_subset_selection(
            cfg.horizon, cfg.select_fraction, cfg.measure_fraction);
        result = simulate_ocba_m(problem, num_arms, cfg.replications, seed);
      }
      // Per-arm bound for the integer budget actually simulated.
      double bound_per_arm = art.bound.q_value;
      for (int t = 0; t < inst.spec.horizon; ++t)
        bound_per_arm +=
            art.lambda[t] * budget.budgets[t] / double(num_arms);
      csv += policy + "," + std::to_string(num_arms) + "," +
             std::to_string(cfg.replications) + "," +
             fmt17(result.mean_per_arm) + "," + fmt17(result.ci_half) + "," +
             fmt17(bound_per_arm) + "," + std::to_string(seed) + "\n";
    }
  }

  std::filesystem::create_directories(out_dir);
  write_file(std::filesystem::path(out_dir) / "results.csv", csv);
  return 0;
}

int check(bool ok, const std::string& name, int& failures) {
  std::cout << (ok ? "PASS " : "FAIL ") << name << "\n";
  if (!ok) ++failures;
  return failures;
}

SubProcessSpec verify_random_spec(std::mt19937_64& rng, int states,
                                  int horizon) {
  std::uniform_real_distribution<double> uniform(0.05, 1.0);
  SubProcessSpec spec;
  spec.num_states = states;
  spec.horizon = horizon;
  spec.initial_state = 0;
  auto kernel = [&] {
    Eigen::MatrixXd k(states, states);
    for (int s = 0; s < states; ++s) {
      for (int sp = 0; sp < states; ++sp) k(s, sp) = uniform(rng);
      k.row(s) /= k.row(s).sum();
      k(s, states - 1) += 1.0 - k.row(s).sum();
    }
    return k;
  };
  spec.kernel_active = kernel();
  spec.kernel_passive = kernel();
  for (int t = 0; t < horizon; ++t) {
    Eigen::MatrixXd r(states, 2);
    for (int s = 0; s < states; ++s)
      for (int a = 0; a < 2; ++a) r(s, a) = uniform(rng);
    spec.reward.push_back(r);
  }
  return spec;
}

int cmd_verify(const std::string& level) {
  if (level != "quick" && level != "full") {
    std::cerr << "verify level must be quick or full\n";
    return kExitConfig;
  }
  int failures = 0;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> lam(0.0, 1.5);

  // Lagrangian decomposition against the joint product-space oracle.
  {
    bool ok = true;
    const int instances = level == "quick" ? 10 : 50;
    for (int i = 0; i < instances && ok; ++i) {
      const SubProcessSpec spec = verify_random_spec(rng, 3, 3);
      BudgetProfile budget;
      budget.num_arms = 2;
      budget.budgets = Eigen::VectorXi::Ones(3);
      for (int probe = 0; probe < 3 && ok; ++probe) {
        Multipliers lambda(3);
        for (int t = 0; t < 3; ++t) lambda[t] = lam(rng);
        const double joint = oracle::joint_unconstrained_lagrangian(
            spec, 2, lambda, budget.budgets);
        const double decomposed = lagrangian_value(spec, lambda, budget);
        if (std::abs(joint - decomposed) > 1e-9) {
          std::cerr << "  decomposition gap " << joint - decomposed
                    << " at instance " << i << " probe " << probe << "\n";
          ok = false;
        }
      }
    }
    check(ok, "lagrangian decomposition matches joint oracle", failures);
  }

  // Rounding residual property.
  {
    bool ok = true;
    std::uniform_int_distribution<int> size(1, 6), total_pick(0, 20);
    std::uniform_real_distribution<double> weight(0.01, 1.0);
    const int trials = level == "quick" ? 200 : 1000;
    for (int i = 0; i < trials && ok; ++i) {
      const int n = size(rng);
      Eigen::VectorXd frac(n);
      for (int j = 0; j < n; ++j) frac[j] = weight(rng);
      frac /= frac.sum();
      const int total = total_pick(rng);
      Eigen::VectorXi avail(n);
      for (int j = 0; j < n; ++j)
        avail[j] = static_cast<int>(std::ceil(total * frac[j])) + 1;
      const Eigen::VectorXi b = rounding(total, frac, avail);
      if (b.sum() != total) ok = false;
      for (int j = 0; j < n; ++j)
        if (b[j] > avail[j] || std::abs(b[j] - total * frac[j]) >= 1.0)
          ok = false;
    }
    check(ok, "rounding keeps every entry within one of its target",
          failures);
  }

  // LP duality and budget transfer on the Bayesian bandit.
  {
    const BernoulliLatticeSpec mab = build_bernoulli_mab(6, 1, 1);
    const Eigen::VectorXd alpha = Eigen::VectorXd::Constant(6, 1.0 / 3.0);
    const Multipliers lambda = multipliers_from_lp(mab.spec, alpha);
    const OccupationSolution occ = solve_occupation(mab.spec, lambda, alpha);
    bool ok = occ.lp.status == LpStatus::kOptimal;
    if (ok)
      ok = std::abs(occ.lp.objective - q_value(mab.spec, lambda)) < 1e-6;
    check(ok, "occupation LP optimum equals the adjusted DP value", failures);

    const IndexTable table = index_table(mab.spec, lambda);
    const RandomizedPolicy policy = extract_policy(occ.rho, table, lambda);
    const Eigen::VectorXd profile = activation_profile(mab.spec, policy);
    check((profile - alpha).cwiseAbs().maxCoeff() < 1e-8,
          "extracted policy reproduces the budget fractions", failures);

    // Index spot-grid against the activation predicate.
    bool grid_ok = true;
    const int points = level == "quick" ? 200 : 2000;
    for (int s = 0; s < mab.spec.num_states && grid_ok; s += 4)
      for (int t = 0; t < 6 && grid_ok; t += 2) {
        double sup = -table.search_bound;
        for (int g = points; g >= 0; --g) {
          const double beta =
              -table.search_bound + g * (2 * table.search_bound / points);
          if (active_at(mab.spec, lambda, s, t, beta)) {
            sup = beta;
            break;
          }
        }
        if (std::abs(table.beta(s, t) - sup) >
            kDefaultIndexTol + 2 * table.search_bound / points)
          grid_ok = false;
      }
    check(grid_ok, "index bisection agrees with grid scan", failures);
  }

  if (level == "full") {
    // Upper-bound sandwich with the exact constrained optimum at K=3.
    bool ok = true;
    for (int i = 0; i < 10 && ok; ++i) {
      const SubProcessSpec spec = verify_random_spec(rng, 3, 3);
      BudgetProfile budget;
      budget.num_arms = 3;
      budget.budgets = Eigen::VectorXi::Ones(3);
      const double optimum =
          oracle::count_space_constrained_optimum(spec, 3, budget.budgets);
      for (int probe = 0; probe < 20 && ok; ++probe) {
        Multipliers lambda(3);
        for (int t = 0; t < 3; ++t) lambda[t] = lam(rng);
        if (lagrangian_value(spec, lambda, budget) < optimum - 1e-9)
          ok = false;
      }
      const BoundReport report = bound_from_lp(spec, budget);
      if (report.bound_value < optimum - 1e-9) ok = false;
    }
    check(ok, "relaxation bounds the exact constrained optimum", failures);
  }

  std::cout << (failures == 0 ? "verify: all checks passed\n"
                              : "verify: FAILURES\n");
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-horizon restless bandit solver and experiment runner"};
  app.require_subcommand(1);

  std::string config_path, out_dir, bundle_dir, level = "quick";

  CLI::App* solve = app.add_subcommand(
      "solve", "Precompute multipliers, indices, and the arm policy");
  solve->add_option("--config", config_path, "JSON config path")->required();
  solve->add_option("--out", out_dir, "output directory")->required();

  CLI::App* simulate = app.add_subcommand(
      "simulate", "Run Monte-Carlo experiments from a solved bundle");
  simulate->add_option("--config", config_path, "JSON config path")
      ->required();
  simulate->add_option("--bundle", bundle_dir, "directory from solve")
      ->required();
  simulate->add_option("--out", out_dir, "output directory")->required();

  CLI::App* verify =
      app.add_subcommand("verify", "Run built-in oracle checks");
  verify->add_option("--level", level, "quick or full");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve(config_path, out_dir);
    if (simulate->parsed())
      return cmd_simulate(config_path, bundle_dir, out_dir);
    return cmd_verify(level);
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    std::cerr << "error: " << what << "\n";
    return what.find("hash mismatch") != std::string::npos ? kExitHash
                                                           : kExitConfig;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  }
}
