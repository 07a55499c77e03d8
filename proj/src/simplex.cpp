#include "rmab/simplex.hpp"

#include <nlohmann/json.hpp>
#include <stdexcept>
#include <vector>

namespace rmab {

namespace {

constexpr double kFeasTol = 1e-8;
constexpr double kPivotTol = 1e-10;
constexpr double kReducedCostTol = 1e-9;
constexpr long kMaxPivots = 1'000'000;

struct Tableau {
  // body is m x (n_total + 1); the last column holds the current rhs.
  // cost holds reduced costs, with the current objective in its last cell.
  Eigen::MatrixXd body;
  Eigen::RowVectorXd cost;
  std::vector<int> basis;

  int rows() const { return static_cast<int>(body.rows()); }
  int cols() const { return static_cast<int>(body.cols()) - 1; }

  void pivot(int r, int j) {
    body.row(r) /= body(r, j);
    for (int i = 0; i < rows(); ++i) {
      if (i == r) continue;
      const double factor = body(i, j);
      if (factor != 0.0) body.row(i) -= factor * body.row(r);
    }
    const double cfactor = cost[j];
    if (cfactor != 0.0) cost -= cfactor * body.row(r);
    basis[r] = j;
  }
};

// Runs Bland-rule pivots until no allowed column improves the objective.
// Returns false when an entering column proves the problem unbounded.
bool run_simplex(Tableau& tab, int entering_limit) {
  long pivots = 0;
  for (;;) {
    int enter = -1;
    for (int j = 0; j < entering_limit; ++j)
      if (tab.cost[j] > kReducedCostTol) {
        enter = j;
        break;
      }
    if (enter < 0) return true;

    int leave = -1;
    double best_ratio = 0;
    for (int i = 0; i < tab.rows(); ++i) {
      const double a = tab.body(i, enter);
      if (a <= kPivotTol) continue;
      const double ratio = tab.body(i, tab.cols()) / a;
      if (leave < 0 || ratio < best_ratio - kPivotTol ||
          (ratio < best_ratio + kPivotTol && tab.basis[i] < tab.basis[leave])) {
        leave = i;
        best_ratio = ratio;
      }
    }
    if (leave < 0) return false;
    tab.pivot(leave, enter);
    if (++pivots > kMaxPivots)
      throw std::runtime_error("simplex pivot limit exceeded");
  }
}

}  // namespace

LpSolution simplex_solve(const LinearProgram& lp) {
  const int m = static_cast<int>(lp.rows.rows());
  const int n = static_cast<int>(lp.rows.cols());
  if (lp.objective.size() != n || lp.rhs.size() != m)
    throw std::invalid_argument("inconsistent LP dimensions");

  Tableau tab;
  tab.body = Eigen::MatrixXd::Zero(m, n + m + 1);
  tab.body.leftCols(n) = lp.rows;
  tab.body.col(n + m) = lp.rhs;
  Eigen::VectorXd row_sign = Eigen::VectorXd::Ones(m);
  for (int i = 0; i < m; ++i) {
    if (tab.body(i, n + m) < 0) {
      tab.body.row(i) *= -1.0;
      row_sign[i] = -1.0;
    }
    tab.body(i, n + i) = 1.0;
    tab.basis.push_back(n + i);
  }

  // Phase 1: maximize minus the artificial mass.
  tab.cost = Eigen::RowVectorXd::Zero(n + m + 1);
  for (int i = 0; i < m; ++i) {
    tab.cost.head(n) += tab.body.row(i).head(n);
    tab.cost[n + m] += tab.body(i, n + m);
  }
  run_simplex(tab, n);
  // The rhs cell of the cost row carries minus the phase-1 objective,
  // i.e. the artificial mass still in the basis.
  if (tab.cost[n + m] > kFeasTol) {
    LpSolution sol;
    sol.status = LpStatus::kInfeasible;
    return sol;
  }

  // Drive basic artificials out where an original pivot exists; rows that
  // admit none are redundant and stay at zero.
  for (int i = 0; i < m; ++i) {
    if (tab.basis[i] < n) continue;
    for (int j = 0; j < n; ++j)
      if (std::abs(tab.body(i, j)) > kPivotTol) {
        tab.pivot(i, j);
        break;
      }
  }

  // Phase 2: rebuild reduced costs from the original objective.
  tab.cost = Eigen::RowVectorXd::Zero(n + m + 1);
  tab.cost.head(n) = lp.objective.transpose();
  for (int i = 0; i < m; ++i) {
    const int b = tab.basis[i];
    if (b < n && lp.objective[b] != 0.0)
      tab.cost -= lp.objective[b] * tab.body.row(i);
  }
  if (!run_simplex(tab, n)) {
    LpSolution sol;
    sol.status = LpStatus::kUnbounded;
    return sol;
  }

  LpSolution sol;
  sol.status = LpStatus::kOptimal;
  sol.primal = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < m; ++i)
    if (tab.basis[i] < n) sol.primal[tab.basis[i]] = tab.body(i, n + m);
  sol.objective = lp.objective.dot(sol.primal);
  sol.dual = Eigen::VectorXd::Zero(m);
  for (int i = 0; i < m; ++i) sol.dual[i] = -tab.cost[n + i] * row_sign[i];
  return sol;
}

nlohmann::json lp_debug_dump(const LinearProgram& lp) {
  nlohmann::json doc;
  doc["objective"] = std::vector<double>(lp.objective.begin(),
                                         lp.objective.end());
  doc["rhs"] = std::vector<double>(lp.rhs.begin(), lp.rhs.end());
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < lp.rows.rows(); ++i) {
    std::vector<double> row(lp.rows.cols());
    for (int j = 0; j < lp.rows.cols(); ++j) row[j] = lp.rows(i, j);
    rows.push_back(std::move(row));
  }
  doc["rows"] = std::move(rows);
  return doc;
}

}  // namespace rmab
