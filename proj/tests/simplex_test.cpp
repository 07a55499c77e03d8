#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>
#include <nlohmann/json.hpp>
#include <random>

#include "rmab/simplex.hpp"

using namespace rmab;

namespace {

// Independent oracle: enumerate all basic solutions and keep the best
// feasible one.
double best_vertex_objective(const LinearProgram& lp) {
  const int m = static_cast<int>(lp.rows.rows());
  const int n = static_cast<int>(lp.rows.cols());
  double best = -1e300;
  std::vector<int> cols(m);
  std::function<void(int, int)> choose = [&](int start, int depth) {
    if (depth == m) {
      Eigen::MatrixXd basis(m, m);
      for (int i = 0; i < m; ++i) basis.col(i) = lp.rows.col(cols[i]);
      Eigen::FullPivLU<Eigen::MatrixXd> lu(basis);
      if (!lu.isInvertible()) return;
      const Eigen::VectorXd xb = lu.solve(lp.rhs);
      if (xb.minCoeff() < -1e-9) return;
      double value = 0;
      for (int i = 0; i < m; ++i) value += lp.objective[cols[i]] * xb[i];
      best = std::max(best, value);
      return;
    }
    for (int j = start; j < n; ++j) {
      cols[depth] = j;
      choose(j + 1, depth + 1);
    }
  };
  choose(0, 0);
  return best;
}

}  // namespace

TEST_CASE("trivial maximization") {
  LinearProgram lp;
  lp.objective = Eigen::VectorXd::Zero(2);
  lp.objective << 1, 0;
  lp.rows = Eigen::MatrixXd::Ones(1, 2);
  lp.rhs = Eigen::VectorXd::Ones(1);
  const LpSolution sol = simplex_solve(lp);
  REQUIRE(sol.status == LpStatus::kOptimal);
  CHECK(sol.primal[0] == doctest::Approx(1.0));
  CHECK(sol.objective == doctest::Approx(1.0));
}

TEST_CASE("infeasible system is reported, not thrown") {
  LinearProgram lp;
  lp.objective = Eigen::VectorXd::Zero(1);
  lp.rows = Eigen::MatrixXd::Ones(1, 1);
  lp.rhs = -Eigen::VectorXd::Ones(1);
  CHECK(simplex_solve(lp).status == LpStatus::kInfeasible);
}

TEST_CASE("unbounded program is reported") {
  // maximize x1 with x1 - x2 = 0: the ray x1 = x2 -> infinity.
  LinearProgram lp;
  lp.objective = Eigen::VectorXd::Zero(2);
  lp.objective << 1, 0;
  lp.rows = Eigen::MatrixXd::Zero(1, 2);
  lp.rows << 1, -1;
  lp.rhs = Eigen::VectorXd::Zero(1);
  CHECK(simplex_solve(lp).status == LpStatus::kUnbounded);
}

TEST_CASE("random dense LPs match vertex enumeration") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> entry(-1.0, 1.0);
  std::uniform_real_distribution<double> positive(0.1, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 6, m = 4;
    LinearProgram lp;
    lp.objective = Eigen::VectorXd::Zero(n);
    lp.rows = Eigen::MatrixXd::Zero(m, n);
    for (int j = 0; j < n; ++j) lp.objective[j] = entry(rng);
    // First row bounds the feasible set; rhs built from a feasible point.
    lp.rows.row(0).setOnes();
    for (int i = 1; i < m; ++i)
      for (int j = 0; j < n; ++j) lp.rows(i, j) = entry(rng);
    Eigen::VectorXd x0(n);
    for (int j = 0; j < n; ++j) x0[j] = positive(rng);
    lp.rhs = lp.rows * x0;

    const LpSolution sol = simplex_solve(lp);
    REQUIRE(sol.status == LpStatus::kOptimal);
    CHECK(sol.objective ==
          doctest::Approx(best_vertex_objective(lp)).epsilon(1e-8));

    // Feasibility, duality, and complementary slackness.
    CHECK((lp.rows * sol.primal - lp.rhs).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(sol.primal.minCoeff() > -1e-10);
    CHECK(std::abs(sol.dual.dot(lp.rhs) - sol.objective) < 1e-7);
    const Eigen::VectorXd reduced =
        lp.objective - lp.rows.transpose() * sol.dual;
    for (int j = 0; j < n; ++j)
      CHECK(std::abs(sol.primal[j] * reduced[j]) < 1e-7);
  }
}

TEST_CASE("beale's degenerate instance terminates at the vertex optimum") {
  // max 0.75 x4 - 150 x5 + 0.02 x6 - 6 x7 over the classic cycling data.
  LinearProgram lp;
  lp.objective = Eigen::VectorXd::Zero(7);
  lp.objective << 0, 0, 0, 0.75, -150, 0.02, -6;
  lp.rows = Eigen::MatrixXd::Zero(3, 7);
  lp.rows.row(0) << 1, 0, 0, 0.25, -60, -0.04, 9;
  lp.rows.row(1) << 0, 1, 0, 0.5, -90, -0.02, 3;
  lp.rows.row(2) << 0, 0, 1, 0, 0, 1, 0;
  lp.rhs = Eigen::VectorXd::Zero(3);
  lp.rhs[2] = 1;
  const LpSolution sol = simplex_solve(lp);
  REQUIRE(sol.status == LpStatus::kOptimal);
  CHECK(sol.objective ==
        doctest::Approx(best_vertex_objective(lp)).epsilon(1e-9));
}

TEST_CASE("kuhn's cycling instance terminates") {
  // Degenerate at the origin; classic pivoting cycles on it. Slacks make
  // it equality-form. The program is unbounded, which is the point: the
  // solver must terminate with a definite status.
  LinearProgram lp;
  lp.objective = Eigen::VectorXd::Zero(6);
  lp.objective << 2, 3, -1, -12, 0, 0;
  lp.rows = Eigen::MatrixXd::Zero(2, 6);
  lp.rows.row(0) << -2, -9, 1, 9, 1, 0;
  lp.rows.row(1) << 1.0 / 3, 1, -1.0 / 3, -2, 0, 1;
  lp.rhs = Eigen::VectorXd::Zero(2);
  const LpSolution sol = simplex_solve(lp);
  CHECK(sol.status == LpStatus::kUnbounded);
}

TEST_CASE("debug dump carries the raw data") {
  LinearProgram lp;
  lp.objective = Eigen::VectorXd::Ones(2);
  lp.rows = Eigen::MatrixXd::Ones(1, 2);
  lp.rhs = Eigen::VectorXd::Ones(1);
  const nlohmann::json doc = lp_debug_dump(lp);
  CHECK(doc.at("objective").size() == 2);
  CHECK(doc.at("rows").at(0).size() == 2);
  CHECK(doc.at("rhs").at(0).get<double>() == 1.0);
}
