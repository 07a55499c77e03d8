#pragma once

#include <Eigen/Dense>

#include "rmab/index.hpp"
#include "rmab/lp.hpp"

namespace rmab {

// The joint system by exchangeability: per-state arm counts at one period.
struct SystemCounts {
  Eigen::VectorXi n;  // counts, summing to K
  int period = 0;     // 0-based
};

struct ActivationPlan {
  Eigen::VectorXi m_active;  // arms to set active per state
};

// Indices within this band are treated as tied.
inline constexpr double kIndexTieBand = 1e-9;

// Integerizes total * frac subject to per-entry caps; the residual is
// distributed by cycling over entries in order.
Eigen::VectorXi rounding(int total, const Eigen::VectorXd& frac,
                         const Eigen::VectorXi& avail);

// One period of the index policy: activate above the pivot index fully,
// split the residual budget across tied states proportionally to
// rho(s, 1, t), falling back to current counts when that mass is zero.
ActivationPlan select_activations(const SystemCounts& counts,
                                  const IndexTable& indices,
                                  const OccupationMeasure& rho, int budget);

}  // namespace rmab
