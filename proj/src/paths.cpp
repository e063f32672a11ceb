#include "mfgt/paths.hpp"

#include <algorithm>

#include <tbb/parallel_for.h>

#include "mfgt/error.hpp"

namespace mfgt {

DiscreteCurve extract_optimal_curve(const ValueField& vf, int start_cell) {
  const int nt = vf.grid().n_steps();
  if (start_cell < 0 || start_cell >= vf.grid().num_cells()) {
    throw Error(ErrorCode::kInvalidArgument, "start cell out of range");
  }
  DiscreteCurve c;
  c.nodes.reserve(static_cast<std::size_t>(nt) + 1);
  c.nodes.push_back(start_cell);
  double action = 0.0;
  int cell = start_cell;
  for (int k = 0; k < nt; ++k) {
    action += vf.step_cost(cell, k);
    cell = vf.successor(cell, k);
    c.nodes.push_back(cell);
  }
  c.action = action;
  return c;
}

double partial_action(const DiscreteCurve& curve, const Model& model,
                      const EvaluationCurveTable& eval, int k_begin,
                      int k_end) {
  double a = 0.0;
  for (int k = k_begin; k < k_end; ++k) {
    a += step_lagrangian_cost(model, eval, curve.nodes[static_cast<std::size_t>(k)],
                              curve.nodes[static_cast<std::size_t>(k) + 1], k);
  }
  return a;
}

double action_of(const DiscreteCurve& curve, const Model& model,
                 const EvaluationCurveTable& eval) {
  if (curve.n_steps() != model.grid().n_steps()) {
    throw Error(ErrorCode::kDimensionMismatch, "curve length does not match grid");
  }
  return partial_action(curve, model, eval, 0, curve.n_steps());
}

bool stencil_feasible(const DiscreteCurve& curve, const TorusGrid& grid,
                      double q_max) {
  const double radius = q_max * grid.dt();
  for (std::size_t k = 0; k + 1 < curve.nodes.size(); ++k) {
    double d = periodic_displacement(grid.center(curve.nodes[k]),
                                     grid.center(curve.nodes[k + 1]))
                   .norm();
    if (!within_radius(d, radius)) return false;
  }
  return true;
}

OccupationHistogram::OccupationHistogram(int num_cells, int n_steps)
    : num_cells_(num_cells),
      n_steps_(n_steps),
      weights_(static_cast<std::size_t>(num_cells) * static_cast<std::size_t>(n_steps), 0.0) {}

double OccupationHistogram::weight(int cell, int k) const {
  return weights_[static_cast<std::size_t>(k) * static_cast<std::size_t>(num_cells_) +
                  static_cast<std::size_t>(cell)];
}

void OccupationHistogram::add(int cell, int k, double w) {
  weights_[static_cast<std::size_t>(k) * static_cast<std::size_t>(num_cells_) +
           static_cast<std::size_t>(cell)] += w;
}

double OccupationHistogram::total_mass() const {
  double s = 0.0;
  for (double w : weights_) s += w;
  return s;
}

double OccupationHistogram::time_marginal(int k) const {
  double s = 0.0;
  for (int i = 0; i < num_cells_; ++i) s += weight(i, k);
  return s;
}

OccupationHistogram occupation_histogram(const DiscreteCurve& curve,
                                         int num_cells) {
  const int nt = curve.n_steps();
  OccupationHistogram h(num_cells, nt);
  for (int k = 0; k < nt; ++k) {
    h.add(curve.nodes[static_cast<std::size_t>(k)], k, 1.0 / nt);
  }
  return h;
}

CostMatrix::CostMatrix(int num_cells, std::vector<double> entries)
    : n_(num_cells), s_(std::move(entries)) {
  if (s_.size() != static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_)) {
    throw Error(ErrorCode::kDimensionMismatch, "cost matrix must be square");
  }
}

CostMatrix cost_matrix(const Model& model, const EvaluationCurveTable& eval,
                       double q_max, bool require_reachable) {
  const int n = model.grid().num_cells();
  std::vector<double> s(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  tbb::parallel_for(0, n, [&](int y) {
    std::vector<double> datum(static_cast<std::size_t>(n), kCostSentinel);
    datum[static_cast<std::size_t>(y)] = 0.0;
    ValueField vf = solve_backward(model, eval, datum, q_max);
    std::span<const double> v0 = vf.slice(0);
    for (int x = 0; x < n; ++x) {
      s[static_cast<std::size_t>(x) * static_cast<std::size_t>(n) +
        static_cast<std::size_t>(y)] = v0[static_cast<std::size_t>(x)];
    }
  });
  CostMatrix cm(n, std::move(s));
  if (require_reachable) {
    for (int x = 0; x < n; ++x) {
      for (int y = 0; y < n; ++y) {
        if (!cm.finite(x, y)) {
          throw Error(ErrorCode::kUnreachable,
                      "cell " + std::to_string(y) + " cannot be reached from " +
                          std::to_string(x) + " within the stencil");
        }
      }
    }
  }
  return cm;
}

}  // namespace mfgt
