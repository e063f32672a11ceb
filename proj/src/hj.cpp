#include "mfgt/hj.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

#include <tbb/parallel_for.h>

#include "mfgt/error.hpp"

namespace mfgt {

ValueField::ValueField(TorusGrid grid, double q_max,
                       std::vector<double> final_datum)
    : grid_(grid), q_max_(q_max), final_datum_(std::move(final_datum)) {
  const std::size_t n = static_cast<std::size_t>(grid_.num_cells());
  const std::size_t nt = static_cast<std::size_t>(grid_.n_steps());
  if (final_datum_.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch,
                "final datum size does not match the grid");
  }
  values_.assign(n * (nt + 1), 0.0);
  successor_.assign(n * (nt + 1), -1);
  step_cost_.assign(n * (nt + 1), 0.0);
  std::copy(final_datum_.begin(), final_datum_.end(),
            values_.begin() + static_cast<std::ptrdiff_t>(n * nt));
}

std::span<const double> ValueField::slice(int k) const {
  return std::span<const double>(values_).subspan(
      index(0, k), static_cast<std::size_t>(grid_.num_cells()));
}

double step_lagrangian_cost(const Model& model,
                            const EvaluationCurveTable& eval, int from, int to,
                            int k) {
  const TorusGrid& g = model.grid();
  Point x = g.center(from);
  PeriodicVector delta = periodic_displacement(x, g.center(to));
  return g.dt() * model.lagrangian(x, eval.slices[static_cast<std::size_t>(k)],
                                   delta / g.dt());
}

ValueField solve_backward(const Model& model, const EvaluationCurveTable& eval,
                          std::span<const double> final_datum, double q_max) {
  const TorusGrid& grid = model.grid();
  const double dt = grid.dt();
  if (!(q_max * dt >= grid.dx() * (1.0 - 1e-12))) {
    throw Error(ErrorCode::kEmptyStencil,
                "q_max * dt is below dx; no move between cells is reachable");
  }
  for (double g : final_datum) {
    if (!std::isfinite(g)) {
      throw Error(ErrorCode::kNonfiniteValue, "final datum is not finite");
    }
  }
  ValueField vf(grid, q_max,
                std::vector<double>(final_datum.begin(), final_datum.end()));
  const Stencil stencil(grid, q_max * dt);
  const std::vector<double> pot = model.potential_table(eval);
  const int n = grid.num_cells();

  for (int k = grid.n_steps() - 1; k >= 0; --k) {
    const double* next = vf.values_.data() + vf.index(0, k + 1);
    const double* pot_k = pot.data() + static_cast<std::size_t>(k) * n;
    std::atomic<bool> finite{true};
    tbb::parallel_for(0, n, [&](int i) {
      const Point x = grid.center(i);
      double best = std::numeric_limits<double>::infinity();
      double best_cost = 0.0;
      int best_j = -1;
      for (const CellIndex& o : stencil.offsets()) {
        const int j = grid.shift(i, o);
        const PeriodicVector delta = periodic_displacement(x, grid.center(j));
        // Same arithmetic as Model::lagrangian with a precomputed potential.
        const double cost = dt * (model.kinetic(delta / dt) - pot_k[i]);
        const double cand = cost + next[j];
        if (cand < best || (cand == best && j < best_j)) {
          best = cand;
          best_cost = cost;
          best_j = j;
        }
      }
      if (!std::isfinite(best)) finite.store(false);
      const std::size_t at = vf.index(i, k);
      vf.values_[at] = best;
      vf.successor_[at] = best_j;
      vf.step_cost_[at] = best_cost;
    });
    if (!finite.load()) {
      throw Error(ErrorCode::kNonfiniteValue,
                  "value field became non-finite at time index " +
                      std::to_string(k));
    }
  }
  return vf;
}

std::vector<double> stability_check(
    const Model& model, const EvaluationCurveTable& eval,
    std::span<const std::vector<double>> datum_sequence, double q_max) {
  if (datum_sequence.empty()) return {};
  const ValueField limit =
      solve_backward(model, eval, datum_sequence.back(), q_max);
  const TorusGrid& grid = model.grid();
  std::vector<double> gaps;
  gaps.reserve(datum_sequence.size());
  for (const std::vector<double>& g : datum_sequence) {
    const ValueField vf = solve_backward(model, eval, g, q_max);
    double gap = 0.0;
    for (int k = 0; k <= grid.n_steps(); ++k) {
      for (int i = 0; i < grid.num_cells(); ++i) {
        gap = std::max(gap, std::abs(vf.value(i, k) - limit.value(i, k)));
      }
    }
    gaps.push_back(gap);
  }
  return gaps;
}

double dpp_check(const ValueField& vf, const Model& model,
                 const EvaluationCurveTable& eval, const DiscreteCurve& curve) {
  double residual = 0.0;
  for (int k = 0; k < curve.n_steps(); ++k) {
    const int a = curve.nodes[static_cast<std::size_t>(k)];
    const int b = curve.nodes[static_cast<std::size_t>(k) + 1];
    const double rhs =
        step_lagrangian_cost(model, eval, a, b, k) + vf.value(b, k + 1);
    residual = std::max(residual, std::abs(vf.value(a, k) - rhs));
  }
  return residual;
}

}  // namespace mfgt
