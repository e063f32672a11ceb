#pragma once

#include <functional>
#include <span>
#include <vector>

namespace mfgt {

struct PlanEntry {
  int source = 0;
  int target = 0;
  double mass = 0.0;
};

struct TransportPlan {
  std::vector<PlanEntry> entries;
  double cost = 0.0;
};

// Exact balanced transportation problem
//   min sum c(i,j) x_ij  s.t.  sum_j x_ij = supply_i, sum_i x_ij = demand_j,
// solved by the primal network simplex on the bipartite spanning-tree basis.
// Supplies and demands must be nonnegative with equal totals (within 1e-9);
// the residual imbalance is absorbed by the largest demand.
TransportPlan solve_transport(std::span<const double> supply,
                              std::span<const double> demand,
                              const std::function<double(int, int)>& cost);

}  // namespace mfgt
