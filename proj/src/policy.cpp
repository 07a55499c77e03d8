#include "rmab/policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace rmab {

Eigen::VectorXi rounding(int total, const Eigen::VectorXd& frac,
                         const Eigen::VectorXi& avail) {
  const int n = static_cast<int>(frac.size());
  if (avail.size() != n)
    throw std::invalid_argument("frac/avail length mismatch");
  if (total < 0 || avail.minCoeff() < 0)
    throw std::invalid_argument("rounding inputs must be nonnegative");
  if (std::abs(frac.sum() - 1.0) > 1e-9)
    throw std::invalid_argument("fractions must sum to 1");
  if (total > avail.sum())
    throw std::invalid_argument("total exceeds available capacity");

  Eigen::VectorXi b(n);
  for (int i = 0; i < n; ++i)
    b[i] = std::min<int>(avail[i],
                         static_cast<int>(std::floor(total * frac[i])));
  int j = 0;
  while (b.sum() < total) {
    if (avail[j] > b[j]) ++b[j];
    j = (j + 1) % n;
  }
  return b;
}

ActivationPlan select_activations(const SystemCounts& counts,
                                  const IndexTable& indices,
                                  const OccupationMeasure& rho, int budget) {
  const int n = static_cast<int>(counts.n.size());
  const int t = counts.period;
  const int total_arms = counts.n.sum();
  if (budget < 1 || budget > total_arms)
    throw std::invalid_argument("budget outside [1, K]");

  // Pivot index: the budget-th largest index among the arms, counted with
  // multiplicity over the occupied states.
  std::vector<int> occupied;
  for (int s = 0; s < n; ++s)
    if (counts.n[s] > 0) occupied.push_back(s);
  std::sort(occupied.begin(), occupied.end(), [&](int a, int b) {
    if (indices.beta(a, t) != indices.beta(b, t))
      return indices.beta(a, t) > indices.beta(b, t);
    return a < b;
  });
  double pivot = 0;
  int cumulative = 0;
  for (int s : occupied) {
    cumulative += counts.n[s];
    if (cumulative >= budget) {
      pivot = indices.beta(s, t);
      break;
    }
  }

  ActivationPlan plan;
  plan.m_active = Eigen::VectorXi::Zero(n);
  std::vector<int> tied;  // ascending state order
  int residual = budget;
  for (int s = 0; s < n; ++s) {
    if (counts.n[s] == 0) continue;
    const double beta = indices.beta(s, t);
    if (beta > pivot + kIndexTieBand) {
      plan.m_active[s] = counts.n[s];
      residual -= counts.n[s];
    } else if (beta >= pivot - kIndexTieBand) {
      tied.push_back(s);
    }
  }

  const int num_tied = static_cast<int>(tied.size());
  Eigen::VectorXd frac(num_tied);
  Eigen::VectorXi avail(num_tied);
  double rho_mass = 0;
  for (int i = 0; i < num_tied; ++i) {
    avail[i] = counts.n[tied[i]];
    rho_mass += rho.active(tied[i], t);
  }
  if (rho_mass > 0) {
    for (int i = 0; i < num_tied; ++i)
      frac[i] = rho.active(tied[i], t) / rho_mass;
  } else {
    // Fall back to the current counts over the tied states.
    const int tied_arms = avail.sum();
    for (int i = 0; i < num_tied; ++i)
      frac[i] = static_cast<double>(avail[i]) / tied_arms;
  }
  const Eigen::VectorXi b = rounding(residual, frac, avail);
  for (int i = 0; i < num_tied; ++i) plan.m_active[tied[i]] = b[i];
  return plan;
}

}  // namespace rmab
