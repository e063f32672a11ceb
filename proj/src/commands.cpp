#include "mfgt/commands.hpp"

#include <cmath>
#include <filesystem>

#include <fmt/core.h>
#include <fmt/ostream.h>

#include "mfgt/conjugate.hpp"
#include "mfgt/error.hpp"
#include "mfgt/field_ce.hpp"
#include "mfgt/hj.hpp"
#include "mfgt/io.hpp"
#include "mfgt/mfg.hpp"
#include "mfgt/paths.hpp"

namespace mfgt {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr double kVerifyTolerance = 1e-9;

std::string join(const std::string& dir, const char* name) {
  return (std::filesystem::path(dir) / name).string();
}

// Model, grid, mu0 and the frozen stationary coupling shared by the
// single-solve commands.
struct Setup {
  TorusGrid grid;
  Model model;
  AtomicTorusMeasure mu0;
  double q_max;
};

Setup make_setup(const RunConfig& cfg) {
  TorusGrid grid = cfg.make_grid();
  Model model(cfg.model, grid);
  AtomicTorusMeasure mu0 = cfg.make_mu0(grid);
  const double q = cfg.q_max(model);
  return Setup{grid, std::move(model), std::move(mu0), q};
}

void write_echo(const RunConfig& cfg, const std::string& out_dir) {
  write_text(join(out_dir, "config.json"), dump_json(cfg.echo()));
}

ordered_json metadata(const Setup& s) {
  return {{"grid", grid_to_json(s.grid)},
          {"dx", s.grid.dx()},
          {"dt", s.grid.dt()},
          {"q_max", s.q_max}};
}

}  // namespace

int cmd_solve_hj(const RunConfig& cfg, const std::string& out_dir, std::ostream& log) {
  const Setup s = make_setup(cfg);
  const EvaluationCurveTable eval = EvaluationCurveTable::stationary(s.mu0, s.grid.n_steps());
  const std::vector<double> datum = s.model.final_datum_table(s.mu0);
  const ValueField vf = solve_backward(s.model, eval, datum, s.q_max);
  const ConstantsTable c = s.model.constants(eval, datum);

  write_echo(cfg, out_dir);
  if (cfg.output.wants("csv")) write_text(join(out_dir, "value_field.csv"), value_field_csv(vf));
  ordered_json meta = metadata(s);
  meta["constants"] = {{"M0", c.M0}, {"m_L", c.m_L}, {"osc_g", c.osc_g}};
  write_text(join(out_dir, "metadata.json"), dump_json(meta));
  fmt::print(log, "solve-hj: {} cells, {} steps, q_max {}\n", s.grid.num_cells(),
             s.grid.n_steps(), format_double(s.q_max));
  return 0;
}

int cmd_optimal_curves(const RunConfig& cfg, const std::string& out_dir, std::ostream& log) {
  const Setup s = make_setup(cfg);
  const EvaluationCurveTable eval = EvaluationCurveTable::stationary(s.mu0, s.grid.n_steps());
  const std::vector<double> datum = s.model.final_datum_table(s.mu0);
  const ValueField vf = solve_backward(s.model, eval, datum, s.q_max);
  std::vector<CurveAtom> atoms;
  for (const CellAtom& a : s.mu0.atoms()) {
    atoms.push_back({extract_optimal_curve(vf, a.cell), a.weight});
  }
  const CurveMeasure xi(std::move(atoms));
  const CertificateReport cert = optimality_certificate(xi, vf, s.model, eval);

  write_echo(cfg, out_dir);
  if (cfg.output.wants("csv")) write_text(join(out_dir, "curves.csv"), curves_csv(s.grid, xi));
  if (cfg.output.wants("json")) {
    write_text(join(out_dir, "curves.jsonl"), curve_measure_jsonl(xi));
  }
  ordered_json meta = metadata(s);
  meta["certificate_gap"] = cert.gap;
  meta["action_integral"] = cert.action_integral;
  write_text(join(out_dir, "metadata.json"), dump_json(meta));
  fmt::print(log, "optimal-curves: {} curves, certificate gap {}\n", xi.size(),
             format_double(cert.gap));
  return 0;
}

int cmd_cost_matrix(const RunConfig& cfg, const std::string& out_dir, std::ostream& log) {
  const Setup s = make_setup(cfg);
  const EvaluationCurveTable eval = EvaluationCurveTable::stationary(s.mu0, s.grid.n_steps());
  const CostMatrix S = cost_matrix(s.model, eval, s.q_max, false);
  long long unreachable = 0;
  for (double v : S.entries()) unreachable += v >= kCostSentinel / 2 ? 1 : 0;

  write_echo(cfg, out_dir);
  if (cfg.output.wants("csv")) write_text(join(out_dir, "cost_matrix.csv"), cost_matrix_csv(S));
  ordered_json meta = metadata(s);
  meta["sentinel"] = kCostSentinel;
  meta["unreachable_pairs"] = unreachable;
  write_text(join(out_dir, "metadata.json"), dump_json(meta));
  fmt::print(log, "cost-matrix: {}x{}, {} unreachable pairs\n", S.size(), S.size(), unreachable);
  return 0;
}

int cmd_mfg(const RunConfig& cfg, const std::string& out_dir, std::ostream& log) {
  const Setup s = make_setup(cfg);
  const CurveMeasure seed = seed_measure(s.grid, s.mu0, s.q_max, cfg.solver.seed);
  const FixedPointState state = iterate_fixed_point(
      s.model, s.mu0, cfg.solver.alpha, cfg.solver.tol, cfg.solver.max_iter, seed, s.q_max);
  const EquilibriumReport report = certify_equilibrium(state, s.model);

  write_echo(cfg, out_dir);
  write_text(join(out_dir, "history.json"), dump_json(history_to_json(state.history)));
  write_text(join(out_dir, "report.json"), dump_json(report_to_json(report, s.grid)));
  if (cfg.output.wants("csv")) {
    write_text(join(out_dir, "value_field.csv"), value_field_csv(report.vf));
    write_text(join(out_dir, "xi_star.csv"), curves_csv(s.grid, report.xi));
  }
  if (cfg.output.wants("json")) {
    write_text(join(out_dir, "xi_star.jsonl"), curve_measure_jsonl(report.xi));
  }
  fmt::print(log, "mfg: {} after {} iterates, residual {}, certificate gap {}\n",
             status_name(report.status), report.iterations, format_double(report.residual),
             format_double(report.certificate_gap));
  return 0;
}

int cmd_fenchel_sweep(const RunConfig& cfg, const std::string& out_dir, std::ostream& log) {
  const Setup s = make_setup(cfg);
  const FenchelConfig& fc = cfg.fenchel;
  const QGrid q_grid(s.grid.dim(), fc.q_radius, fc.q_spacing);
  const double beta0 = PerturbedLagrangian::default_beta0(s.model, s.mu0);

  std::vector<Vec> directions{Vec{{1.0, 0.0}}};
  if (s.grid.dim() == 2) directions.push_back(Vec{{std::sqrt(0.5), std::sqrt(0.5)}});

  ordered_json flags = ordered_json::array();
  int mismatches = 0;
  for (double beta : fc.betas) {
    const PerturbedLagrangian lb(s.model, fc.x, s.mu0, beta, beta0);
    for (double frac : fc.probe_fractions) {
      for (const Vec& dir : directions) {
        const Vec p = (frac * beta) * dir;
        const ConjugateValue cv = numeric_conjugate(lb, q_grid, p, beta0);
        const bool expected = p.norm() > beta;
        mismatches += cv.unbounded_direction != expected ? 1 : 0;
        flags.push_back({{"beta", beta},
                         {"p", {p[0], p[1]}},
                         {"value", cv.value},
                         {"unbounded", cv.unbounded_direction},
                         {"expected_unbounded", expected}});
      }
    }
  }

  std::vector<Vec> probes;
  for (const Vec& q : q_grid.points()) {
    if (within_radius(q.norm(), fc.window)) probes.push_back(q);
  }
  const std::vector<double> gaps =
      betino_convergence_sweep(s.model, fc.x, s.mu0, probes, fc.betas, q_grid);

  write_echo(cfg, out_dir);
  ordered_json out;
  out["beta0"] = beta0;
  out["flags"] = flags;
  out["flag_mismatches"] = mismatches;
  out["sweep"] = {{"betas", fc.betas}, {"window", fc.window}, {"gaps", gaps}};
  write_text(join(out_dir, "fenchel.json"), dump_json(out));
  fmt::print(log, "fenchel-sweep: {} flag checks, {} mismatches\n", flags.size(), mismatches);
  return 0;
}

int cmd_continuity_check(const RunConfig& cfg, const std::string& out_dir, std::ostream& log) {
  const Setup s = make_setup(cfg);
  const ResponseImage img = apply_T_full(CurveMeasure::stationary(s.mu0, s.grid.n_steps()),
                                         s.model, s.mu0, s.q_max);
  const std::vector<FieldSample> samples =
      field_along_measure(img.image, img.vf, s.model, img.eval);
  const std::vector<TestFunction> tests = standard_test_family(s.grid.dim());
  const std::vector<ContinuityResidual> res =
      continuity_residual(s.grid, img.image, samples, tests);
  const HpComparison hp = compare_with_hp(img.vf, samples, s.model, 10.0 * s.grid.dx());

  const std::vector<double> hs = default_h_set(s.grid);
  int tested = 0;
  int passed = 0;
  const double tol_dd = s.grid.dx() + s.grid.dt();
  for (const FieldSample& f : samples) {
    if (f.k == 0) continue;
    ++tested;
    passed += directional_derivative_test(img.vf, s.model, img.eval, f.cell, f.k, f.velocity,
                                          hs, tol_dd)
                      .pass
                  ? 1
                  : 0;
  }

  write_echo(cfg, out_dir);
  ordered_json out;
  ordered_json table = ordered_json::array();
  double worst = 0.0;
  for (const ContinuityResidual& r : res) {
    table.push_back({{"id", r.id}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"residual", r.residual}});
    worst = std::max(worst, r.residual);
  }
  out["continuity"] = table;
  out["max_residual"] = worst;
  out["hp_comparison"] = {{"median", hp.median}, {"max", hp.max}, {"kinks", hp.kink_count},
                          {"samples", hp.gaps.size()}};
  out["collision_gap"] = max_collision_gap(samples);
  out["directional"] = {{"tol", tol_dd}, {"tested", tested}, {"passed", passed}};
  write_text(join(out_dir, "continuity.json"), dump_json(out));
  fmt::print(log, "continuity-check: max residual {}, H_p median gap {}\n",
             format_double(worst), format_double(hp.median));
  return 0;
}

int cmd_verify(const RunConfig& cfg, const std::string& report_path, std::ostream& log) {
  json stored;
  try {
    stored = json::parse(read_text(report_path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kConfig, "report " + report_path + " does not parse");
  }
  const Setup s = make_setup(cfg);
  const TorusGrid stored_grid = grid_from_json(stored.at("grid"));
  if (!(stored_grid == s.grid)) {
    throw Error(ErrorCode::kDimensionMismatch, "report grid differs from the config grid");
  }
  const CurveMeasure xi = curve_measure_from_json(stored.at("xi"));
  if (xi.n_steps() != s.grid.n_steps()) {
    throw Error(ErrorCode::kDimensionMismatch, "stored curves do not match n_t");
  }
  const double q_max = stored.at("q_max").get<double>();

  FixedPointState state;
  state.xi = xi;
  state.q_max = q_max;
  state.alpha = stored.at("alpha").get<double>();
  state.iterate = stored.at("iterations").get<int>();
  const ResponseImage img = apply_T_full(xi, s.model, s.mu0, q_max);
  state.residual = wasserstein1_curves(s.grid, xi, img.image);
  const EquilibriumReport fresh = certify_equilibrium(state, s.model);

  int mismatches = 0;
  auto check = [&](const std::string& name, double recomputed, const json& saved) {
    const double v = saved.get<double>();
    if (std::abs(recomputed - v) > kVerifyTolerance * std::max(1.0, std::abs(v))) {
      ++mismatches;
      fmt::print(log, "mismatch {}: stored {} recomputed {}\n", name, format_double(v),
                 format_double(recomputed));
    }
  };
  check("residual", fresh.residual, stored.at("residual"));
  check("certificate_gap", fresh.certificate_gap, stored.at("certificate_gap"));
  const json& chain = stored.at("duality_chain");
  check("action_integral", fresh.chain.action_integral, chain.at("action_integral"));
  check("transport_cost", fresh.chain.transport_cost, chain.at("transport_cost"));
  check("dual_difference", fresh.chain.dual_difference, chain.at("dual_difference"));
  const json& cont = stored.at("continuity");
  if (cont.size() != fresh.continuity.size()) {
    ++mismatches;
    fmt::print(log, "mismatch continuity: table sizes differ\n");
  } else {
    for (std::size_t i = 0; i < cont.size(); ++i) {
      check("continuity " + fresh.continuity[i].id, fresh.continuity[i].residual,
            cont[i].at("residual"));
    }
  }
  if (fresh.abs_continuity && stored.at("abs_continuity").is_object()) {
    check("abs_continuity", fresh.abs_continuity->norm, stored["abs_continuity"].at("norm"));
  }
  const json& v0 = stored.at("value_at_start");
  const std::span<const double> fresh_v0 = fresh.vf.slice(0);
  if (v0.size() != fresh_v0.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "stored value slice has the wrong size");
  }
  for (std::size_t i = 0; i < v0.size(); ++i) {
    check("value_at_start[" + std::to_string(i) + "]", fresh_v0[i], v0[i]);
  }

  if (mismatches > 0) {
    fmt::print(log, "verify: FAIL ({} mismatches)\n", mismatches);
    return 1;
  }
  fmt::print(log, "verify: ok\n");
  return 0;
}

}  // namespace mfgt
