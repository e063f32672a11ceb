#pragma once

#include <vector>

#include "mfgt/atomic_measure.hpp"
#include "mfgt/curve.hpp"
#include "mfgt/hj.hpp"
#include "mfgt/models.hpp"
#include "mfgt/torus.hpp"

namespace mfgt {

// Follows successor pointers from (start_cell, 0). The cached action is the
// sum of recorded step costs, so action + g(end) reproduces v(start, 0).
DiscreteCurve extract_optimal_curve(const ValueField& vf, int start_cell);

// Rectangle-rule action sum_{k in [k_begin, k_end)} dt L(z_k, t_k, delta_k/dt).
double action_of(const DiscreteCurve& curve, const Model& model,
                 const EvaluationCurveTable& eval);
double partial_action(const DiscreteCurve& curve, const Model& model,
                      const EvaluationCurveTable& eval, int k_begin, int k_end);

// True when every step stays within radius q_max * dt.
bool stencil_feasible(const DiscreteCurve& curve, const TorusGrid& grid,
                      double q_max);

// Space-time occupation measure: weight 1/n_t at (nodes[k], k), k < n_t.
class OccupationHistogram {
 public:
  OccupationHistogram(int num_cells, int n_steps);

  double weight(int cell, int k) const;
  void add(int cell, int k, double w);
  double total_mass() const;
  double time_marginal(int k) const;
  int num_cells() const { return num_cells_; }
  int n_steps() const { return n_steps_; }

 private:
  int num_cells_;
  int n_steps_;
  std::vector<double> weights_;
};

OccupationHistogram occupation_histogram(const DiscreteCurve& curve,
                                         int num_cells);

// Sentinel used for unreachable endpoints in pinned-endpoint solves. Entries
// at or above kCostSentinel / 2 are treated as infinite.
inline constexpr double kCostSentinel = 1e9;

// S_T(x, y) over all cell pairs.
class CostMatrix {
 public:
  CostMatrix(int num_cells, std::vector<double> entries);

  int size() const { return n_; }
  double at(int from, int to) const {
    return s_[static_cast<std::size_t>(from) * static_cast<std::size_t>(n_) +
              static_cast<std::size_t>(to)];
  }
  bool finite(int from, int to) const { return at(from, to) < kCostSentinel / 2; }
  const std::vector<double>& entries() const { return s_; }

 private:
  int n_;
  std::vector<double> s_;
};

// Column y of S is the time-0 slice of a backward solve with datum 0 at y and
// the sentinel elsewhere. Throws Error(kUnreachable) when require_reachable
// and some pair cannot be joined within the stencil.
CostMatrix cost_matrix(const Model& model, const EvaluationCurveTable& eval,
                       double q_max, bool require_reachable = true);

}  // namespace mfgt
