#pragma once

#include <span>
#include <vector>

#include "mfgt/atomic_measure.hpp"
#include "mfgt/curve.hpp"
#include "mfgt/models.hpp"
#include "mfgt/torus.hpp"

namespace mfgt {

// Discrete Lax-Oleinik solution v(x_i, t_k) with the argmin successor of
// every (cell, k < n_t) and the cost of that step.
//
// Invariants: slice(n_t) equals the final datum; for k < n_t
//   value(i,k) = step_cost(i,k) + value(successor(i,k), k+1).
class ValueField {
 public:
  ValueField(TorusGrid grid, double q_max, std::vector<double> final_datum);

  const TorusGrid& grid() const { return grid_; }
  double q_max() const { return q_max_; }

  double value(int cell, int k) const { return values_[index(cell, k)]; }
  int successor(int cell, int k) const { return successor_[index(cell, k)]; }
  double step_cost(int cell, int k) const { return step_cost_[index(cell, k)]; }
  std::span<const double> slice(int k) const;
  std::span<const double> final_datum() const { return final_datum_; }

 private:
  friend ValueField solve_backward(const Model&, const EvaluationCurveTable&,
                                   std::span<const double>, double);

  std::size_t index(int cell, int k) const {
    return static_cast<std::size_t>(k) * static_cast<std::size_t>(grid_.num_cells()) +
           static_cast<std::size_t>(cell);
  }

  TorusGrid grid_;
  double q_max_;
  std::vector<double> final_datum_;
  std::vector<double> values_;
  std::vector<int> successor_;
  std::vector<double> step_cost_;
};

// Backward dynamic programming over cell-to-cell moves of length at most
// q_max * dt. Step cost is dt * L(x_i, eval[k], delta / dt); ties go to the
// smallest successor index.
//
// Throws Error(kEmptyStencil) when q_max * dt < dx and Error(kNonfiniteValue)
// when the model or datum produces a non-finite number.
ValueField solve_backward(const Model& model, const EvaluationCurveTable& eval,
                          std::span<const double> final_datum, double q_max);

// sup_{i,k} |v_n - v_last| for every datum in the sequence, where v_last is
// the solution for the final datum of the sequence.
std::vector<double> stability_check(
    const Model& model, const EvaluationCurveTable& eval,
    std::span<const std::vector<double>> datum_sequence, double q_max);

// max_k |v(z_k,k) - (dt L(z_k, t_k, delta_k/dt) + v(z_{k+1},k+1))|.
double dpp_check(const ValueField& vf, const Model& model,
                 const EvaluationCurveTable& eval, const DiscreteCurve& curve);

// dt * L(x_from, eval[k], delta/dt) for the move from -> to at time index k.
double step_lagrangian_cost(const Model& model,
                            const EvaluationCurveTable& eval, int from, int to,
                            int k);

}  // namespace mfgt
