#include "mfgt/mfg.hpp"

#include <map>
#include <random>

#include "mfgt/error.hpp"
#include "mfgt/paths.hpp"

namespace mfgt {

namespace {

constexpr double kDropWeight = 1e-12;

}  // namespace

ResponseImage apply_T_full(const CurveMeasure& xi, const Model& model,
                           const AtomicTorusMeasure& mu0, double q_max) {
  EvaluationCurveTable eval = evaluation_curve(xi);
  std::vector<double> datum = model.final_datum_table(eval.slices.back());
  ValueField vf = solve_backward(model, eval, datum, q_max);
  std::vector<CurveAtom> atoms;
  for (const CellAtom& a : mu0.atoms()) {
    atoms.push_back({extract_optimal_curve(vf, a.cell), a.weight});
  }
  return ResponseImage{CurveMeasure(std::move(atoms)), std::move(eval),
                       std::move(datum), std::move(vf)};
}

CurveMeasure apply_T(const CurveMeasure& xi, const Model& model,
                     const AtomicTorusMeasure& mu0, double q_max) {
  return apply_T_full(xi, model, mu0, q_max).image;
}

CurveMeasure prune_to_initial(const CurveMeasure& xi, const AtomicTorusMeasure& mu0) {
  std::map<int, double> target;
  for (const CellAtom& a : mu0.atoms()) target[a.cell] = a.weight;
  std::map<int, double> kept;
  std::vector<CurveAtom> atoms;
  for (const CurveAtom& a : xi.atoms()) {
    if (a.weight < kDropWeight) continue;
    if (!target.count(a.curve.start())) {
      throw Error(ErrorCode::kInvalidMeasure, "curve starts outside the support of mu0");
    }
    kept[a.curve.start()] += a.weight;
    atoms.push_back(a);
  }
  for (const auto& [cell, mass] : target) {
    if (!kept.count(cell)) {
      throw Error(ErrorCode::kInvalidMeasure,
                  "no curve left from cell " + std::to_string(cell));
    }
  }
  for (CurveAtom& a : atoms) {
    const int c = a.curve.start();
    a.weight *= target[c] / kept[c];
  }
  return CurveMeasure(std::move(atoms));
}

const char* status_name(FixedPointStatus s) {
  return s == FixedPointStatus::kConverged ? "converged" : "no-convergence";
}

FixedPointState iterate_fixed_point(const Model& model,
                                    const AtomicTorusMeasure& mu0, double alpha,
                                    double tol, int max_iter,
                                    const CurveMeasure& seed, double q_max) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "damping must lie in (0, 1]");
  }
  if (max_iter < 0) throw Error(ErrorCode::kInvalidArgument, "max_iter must be >= 0");
  if (!(seed.initial() == mu0)) {
    throw Error(ErrorCode::kInvalidMeasure, "seed does not start from mu0");
  }
  const TorusGrid& grid = model.grid();
  if (!seed.stencil_feasible(grid, q_max)) {
    throw Error(ErrorCode::kInvalidArgument, "seed leaves the velocity stencil");
  }

  FixedPointState state;
  state.alpha = alpha;
  state.q_max = q_max;
  state.xi = seed;
  ResponseImage img = apply_T_full(state.xi, model, mu0, q_max);

  auto evaluate = [&](const ResponseImage& r) {
    state.residual = wasserstein1_curves(grid, state.xi, r.image);
    state.gap = optimality_certificate(r.image, r.vf, model, r.eval).gap;
  };

  if (max_iter == 0) {
    evaluate(img);
    return state;
  }
  for (int it = 1; it <= max_iter; ++it) {
    state.xi = it == 1 ? img.image : prune_to_initial(mix(state.xi, img.image, alpha), mu0);
    img = apply_T_full(state.xi, model, mu0, q_max);
    evaluate(img);
    state.iterate = it;
    state.history.push_back({it, state.residual, state.gap, state.xi.size()});
    if (state.residual <= tol) {
      state.status = FixedPointStatus::kConverged;
      break;
    }
  }
  return state;
}

CurveMeasure seed_measure(const TorusGrid& grid, const AtomicTorusMeasure& mu0,
                          double q_max, unsigned long long seed) {
  if (seed == 0) return CurveMeasure::stationary(mu0, grid.n_steps());
  const Stencil stencil(grid, q_max * grid.dt());
  if (stencil.empty()) throw Error(ErrorCode::kEmptyStencil, "no admissible moves");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, stencil.offsets().size() - 1);
  std::vector<CurveAtom> atoms;
  for (const CellAtom& a : mu0.atoms()) {
    DiscreteCurve c;
    c.nodes.push_back(a.cell);
    for (int k = 0; k < grid.n_steps(); ++k) {
      c.nodes.push_back(grid.shift(c.nodes.back(), stencil.offsets()[pick(rng)]));
    }
    atoms.push_back({std::move(c), a.weight});
  }
  return CurveMeasure(std::move(atoms));
}

DualityChain duality_chain(const CurveMeasure& xi, const ValueField& vf,
                           const Model& model, const EvaluationCurveTable& eval) {
  DualityChain chain;
  const CertificateReport cert = optimality_certificate(xi, vf, model, eval);
  chain.action_integral = cert.action_integral;
  chain.dual_difference = cert.initial_value - cert.final_datum_value;
  const CostMatrix S = cost_matrix(model, eval, vf.q_max(), false);
  chain.transport_cost = transport_cost(xi.initial(), xi.terminal(), S).cost;
  return chain;
}

EquilibriumReport certify_equilibrium(const FixedPointState& state,
                                      const Model& model) {
  const TorusGrid& grid = model.grid();
  const EvaluationCurveTable eval = evaluation_curve(state.xi);
  const std::vector<double> datum = model.final_datum_table(eval.slices.back());
  ValueField vf = solve_backward(model, eval, datum, state.q_max);

  EquilibriumReport report{.status = state.status,
                           .iterations = state.iterate,
                           .alpha = state.alpha,
                           .residual = state.residual,
                           .certificate_gap = 0.0,
                           .xi = state.xi,
                           .vf = vf,
                           .chain = {},
                           .continuity = {},
                           .abs_continuity = std::nullopt,
                           .history = state.history};
  report.certificate_gap = optimality_certificate(state.xi, vf, model, eval).gap;
  report.chain = duality_chain(state.xi, vf, model, eval);
  const std::vector<FieldSample> samples =
      field_along_measure(state.xi, vf, model, eval, false);
  const std::vector<TestFunction> tests = standard_test_family(grid.dim());
  report.continuity = continuity_residual(grid, state.xi, samples, tests);
  const ModelSpec& spec = model.spec();
  if (spec.r > 1.0 + spec.eps0) {
    report.abs_continuity = abs_continuity_profile(grid, state.xi, spec.eps0);
  }
  return report;
}

}  // namespace mfgt
