#include "mfgt/measures.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "mfgt/error.hpp"

namespace mfgt {

namespace {

constexpr double kMassTolerance = 1e-12;

void check_weight(double w) {
  if (!(w >= 0.0) || !std::isfinite(w)) {
    throw Error(ErrorCode::kInvalidMeasure, "weights must be finite and nonnegative");
  }
}

void check_total(double total) {
  if (std::abs(total - 1.0) > kMassTolerance) {
    throw Error(ErrorCode::kInvalidMeasure,
                "weights sum to " + std::to_string(total) + ", expected 1");
  }
}

}  // namespace

AtomicTorusMeasure::AtomicTorusMeasure(std::vector<CellAtom> atoms) {
  std::sort(atoms.begin(), atoms.end(),
            [](const CellAtom& a, const CellAtom& b) { return a.cell < b.cell; });
  double total = 0.0;
  for (const CellAtom& a : atoms) {
    check_weight(a.weight);
    if (a.cell < 0) throw Error(ErrorCode::kInvalidMeasure, "negative cell index");
    total += a.weight;
    if (a.weight == 0.0) continue;
    if (!atoms_.empty() && atoms_.back().cell == a.cell) {
      atoms_.back().weight += a.weight;
    } else {
      atoms_.push_back(a);
    }
  }
  check_total(total);
}

AtomicTorusMeasure AtomicTorusMeasure::dirac(int cell) {
  return AtomicTorusMeasure({CellAtom{cell, 1.0}});
}

AtomicTorusMeasure AtomicTorusMeasure::uniform(const TorusGrid& grid) {
  std::vector<CellAtom> atoms;
  const int n = grid.num_cells();
  for (int i = 0; i < n; ++i) atoms.push_back({i, 1.0 / n});
  return AtomicTorusMeasure(std::move(atoms));
}

AtomicTorusMeasure AtomicTorusMeasure::from_density(std::span<const double> density) {
  double total = 0.0;
  for (double d : density) {
    check_weight(d);
    total += d;
  }
  if (!(total > 0.0)) throw Error(ErrorCode::kInvalidMeasure, "density has zero mass");
  std::vector<CellAtom> atoms;
  for (std::size_t i = 0; i < density.size(); ++i) {
    atoms.push_back({static_cast<int>(i), density[i] / total});
  }
  // Renormalize against roundoff in the division.
  double s = 0.0;
  for (const CellAtom& a : atoms) s += a.weight;
  for (CellAtom& a : atoms) a.weight /= s;
  return AtomicTorusMeasure(std::move(atoms));
}

double AtomicTorusMeasure::total_mass() const {
  double s = 0.0;
  for (const CellAtom& a : atoms_) s += a.weight;
  return s;
}

double AtomicTorusMeasure::integrate(std::span<const double> table) const {
  double s = 0.0;
  for (const CellAtom& a : atoms_) s += a.weight * table[static_cast<std::size_t>(a.cell)];
  return s;
}

EvaluationCurveTable EvaluationCurveTable::stationary(const AtomicTorusMeasure& mu,
                                                      int n_steps) {
  return EvaluationCurveTable{
      std::vector<AtomicTorusMeasure>(static_cast<std::size_t>(n_steps) + 1, mu)};
}

CurveMeasure::CurveMeasure(std::vector<CurveAtom> atoms) {
  if (atoms.empty()) throw Error(ErrorCode::kInvalidMeasure, "empty curve measure");
  const std::size_t len = atoms.front().curve.nodes.size();
  double total = 0.0;
  for (const CurveAtom& a : atoms) {
    check_weight(a.weight);
    if (a.curve.nodes.size() != len || len == 0) {
      throw Error(ErrorCode::kInvalidMeasure, "curves have different lengths");
    }
    total += a.weight;
  }
  check_total(total);
  std::stable_sort(atoms.begin(), atoms.end(), [](const CurveAtom& a, const CurveAtom& b) {
    return a.curve.nodes < b.curve.nodes;
  });
  for (CurveAtom& a : atoms) {
    if (a.weight == 0.0) continue;
    if (!atoms_.empty() && atoms_.back().curve.nodes == a.curve.nodes) {
      atoms_.back().weight += a.weight;
    } else {
      atoms_.push_back(std::move(a));
    }
  }
}

CurveMeasure CurveMeasure::stationary(const AtomicTorusMeasure& mu, int n_steps) {
  std::vector<CurveAtom> atoms;
  for (const CellAtom& a : mu.atoms()) {
    atoms.push_back({DiscreteCurve::constant(a.cell, n_steps), a.weight});
  }
  return CurveMeasure(std::move(atoms));
}

int CurveMeasure::n_steps() const {
  return atoms_.empty() ? 0 : atoms_.front().curve.n_steps();
}

double CurveMeasure::total_mass() const {
  double s = 0.0;
  for (const CurveAtom& a : atoms_) s += a.weight;
  return s;
}

AtomicTorusMeasure CurveMeasure::at_time(int k) const {
  std::vector<CellAtom> atoms;
  atoms.reserve(atoms_.size());
  for (const CurveAtom& a : atoms_) {
    atoms.push_back({a.curve.nodes[static_cast<std::size_t>(k)], a.weight});
  }
  return AtomicTorusMeasure(std::move(atoms));
}

bool CurveMeasure::stencil_feasible(const TorusGrid& grid, double q_max) const {
  return std::all_of(atoms_.begin(), atoms_.end(), [&](const CurveAtom& a) {
    return mfgt::stencil_feasible(a.curve, grid, q_max);
  });
}

CurveMeasure mix(const CurveMeasure& a, const CurveMeasure& b, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "mixing weight must lie in [0,1]");
  }
  std::vector<CurveAtom> atoms;
  atoms.reserve(a.size() + b.size());
  for (const CurveAtom& x : a.atoms()) atoms.push_back({x.curve, (1.0 - alpha) * x.weight});
  for (const CurveAtom& x : b.atoms()) atoms.push_back({x.curve, alpha * x.weight});
  return CurveMeasure(std::move(atoms));
}

EvaluationCurveTable evaluation_curve(const CurveMeasure& xi) {
  EvaluationCurveTable table;
  for (int k = 0; k <= xi.n_steps(); ++k) table.slices.push_back(xi.at_time(k));
  return table;
}

double wasserstein1(const TorusGrid& grid, const AtomicTorusMeasure& mu,
                    const AtomicTorusMeasure& nu, std::size_t atom_cap) {
  if (mu.size() > atom_cap || nu.size() > atom_cap) {
    throw Error(ErrorCode::kSizeCap, "atom count exceeds the transport cap");
  }
  std::vector<double> a;
  std::vector<double> b;
  std::vector<Point> xa;
  std::vector<Point> xb;
  for (const CellAtom& x : mu.atoms()) {
    a.push_back(x.weight);
    xa.push_back(grid.center(x.cell));
  }
  for (const CellAtom& x : nu.atoms()) {
    b.push_back(x.weight);
    xb.push_back(grid.center(x.cell));
  }
  return solve_transport(a, b, [&](int i, int j) {
           return periodic_displacement(xa[static_cast<std::size_t>(i)],
                                        xb[static_cast<std::size_t>(j)])
               .norm();
         })
      .cost;
}

double uniform_distance(const TorusGrid& grid, const DiscreteCurve& a,
                        const DiscreteCurve& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.nodes.size(); ++k) {
    if (a.nodes[k] == b.nodes[k]) continue;
    d = std::max(d, periodic_displacement(grid.center(a.nodes[k]),
                                          grid.center(b.nodes[k]))
                        .norm());
  }
  return d;
}

double wasserstein1_curves(const TorusGrid& grid, const CurveMeasure& xi1,
                           const CurveMeasure& xi2, std::size_t atom_cap) {
  if (xi1.size() > atom_cap || xi2.size() > atom_cap) {
    throw Error(ErrorCode::kSizeCap, "atom count exceeds the transport cap");
  }
  if (xi1.n_steps() != xi2.n_steps()) {
    throw Error(ErrorCode::kDimensionMismatch, "curve measures on different time grids");
  }
  std::vector<double> a;
  std::vector<double> b;
  for (const CurveAtom& x : xi1.atoms()) a.push_back(x.weight);
  for (const CurveAtom& x : xi2.atoms()) b.push_back(x.weight);
  return solve_transport(a, b, [&](int i, int j) {
           return uniform_distance(grid, xi1.atoms()[static_cast<std::size_t>(i)].curve,
                                   xi2.atoms()[static_cast<std::size_t>(j)].curve);
         })
      .cost;
}

TransportPlan transport_cost(const AtomicTorusMeasure& mu,
                             const AtomicTorusMeasure& nu, const CostMatrix& S) {
  std::vector<double> a;
  std::vector<double> b;
  for (const CellAtom& x : mu.atoms()) a.push_back(x.weight);
  for (const CellAtom& y : nu.atoms()) b.push_back(y.weight);
  for (const CellAtom& x : mu.atoms()) {
    for (const CellAtom& y : nu.atoms()) {
      if (!S.finite(x.cell, y.cell)) {
        throw Error(ErrorCode::kInfeasibleCost,
                    "no stencil path joins cell " + std::to_string(x.cell) +
                        " to cell " + std::to_string(y.cell));
      }
    }
  }
  return solve_transport(a, b, [&](int i, int j) {
    return S.at(mu.atoms()[static_cast<std::size_t>(i)].cell,
                nu.atoms()[static_cast<std::size_t>(j)].cell);
  });
}

CertificateReport optimality_certificate(const CurveMeasure& xi,
                                         const ValueField& vf,
                                         const Model& model,
                                         const EvaluationCurveTable& eval) {
  CertificateReport r;
  const std::span<const double> v0 = vf.slice(0);
  const std::span<const double> g = vf.final_datum();
  for (const CurveAtom& a : xi.atoms()) {
    const double action = action_of(a.curve, model, eval);
    const double start = v0[static_cast<std::size_t>(a.curve.start())];
    const double end = g[static_cast<std::size_t>(a.curve.end())];
    r.action_integral += a.weight * action;
    r.initial_value += a.weight * start;
    r.final_datum_value += a.weight * end;
    r.atom_gaps.push_back(action - (start - end));
  }
  r.gap = r.action_integral - (r.initial_value - r.final_datum_value);
  return r;
}

std::vector<StartGroup> group_by_start(const CurveMeasure& xi) {
  std::map<int, std::vector<CurveAtom>> by_start;
  std::map<int, double> mass;
  for (const CurveAtom& a : xi.atoms()) {
    by_start[a.curve.start()].push_back(a);
    mass[a.curve.start()] += a.weight;
  }
  std::vector<StartGroup> groups;
  for (auto& [cell, atoms] : by_start) {
    const double m = mass[cell];
    double s = 0.0;
    for (CurveAtom& a : atoms) {
      a.weight /= m;
      s += a.weight;
    }
    for (CurveAtom& a : atoms) a.weight /= s;
    groups.push_back({cell, m, CurveMeasure(std::move(atoms))});
  }
  return groups;
}

CurveMeasure recombine(std::span<const StartGroup> groups) {
  std::vector<CurveAtom> atoms;
  for (const StartGroup& g : groups) {
    for (const CurveAtom& a : g.conditional.atoms()) {
      atoms.push_back({a.curve, g.mass * a.weight});
    }
  }
  return CurveMeasure(std::move(atoms));
}

}  // namespace mfgt
