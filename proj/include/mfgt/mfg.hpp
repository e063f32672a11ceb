#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mfgt/atomic_measure.hpp"
#include "mfgt/field_ce.hpp"
#include "mfgt/hj.hpp"
#include "mfgt/measures.hpp"
#include "mfgt/models.hpp"

namespace mfgt {

// One application of the best-response map with everything it was built from.
struct ResponseImage {
  CurveMeasure image;
  EvaluationCurveTable eval;   // evaluation curve of the argument
  std::vector<double> datum;   // g(., xi(T))
  ValueField vf;
};

// Freezes the coupling at the evaluation curve of xi, solves backward and
// sends every atom of mu0 along its DP-optimal curve.
ResponseImage apply_T_full(const CurveMeasure& xi, const Model& model,
                           const AtomicTorusMeasure& mu0, double q_max);
CurveMeasure apply_T(const CurveMeasure& xi, const Model& model,
                     const AtomicTorusMeasure& mu0, double q_max);

// Merge, drop atoms below 1e-12 and rescale each start group to its mu0 mass.
CurveMeasure prune_to_initial(const CurveMeasure& xi, const AtomicTorusMeasure& mu0);

enum class FixedPointStatus { kConverged, kNoConvergence };
const char* status_name(FixedPointStatus s);

struct IterateRecord {
  int iterate = 0;
  double residual = 0.0;
  double gap = 0.0;
  std::size_t atoms = 0;
};

struct FixedPointState {
  int iterate = 0;
  CurveMeasure xi;
  double residual = 0.0;
  double gap = 0.0;  // certificate gap of T(xi)
  double alpha = 1.0;
  double q_max = 0.0;
  FixedPointStatus status = FixedPointStatus::kNoConvergence;
  std::vector<IterateRecord> history;
};

// Iterate 1 is T(seed); afterwards xi <- (1 - alpha) xi + alpha T(xi). The
// residual of an iterate is W1 on curves between xi and T(xi). Stops once
// residual <= tol or after max_iter iterates; max_iter = 0 reports the seed.
FixedPointState iterate_fixed_point(const Model& model,
                                    const AtomicTorusMeasure& mu0, double alpha,
                                    double tol, int max_iter,
                                    const CurveMeasure& seed, double q_max);

// Seed curves: stationary when seed == 0, otherwise random stencil moves
// drawn from mt19937_64(seed), one curve per atom of mu0.
CurveMeasure seed_measure(const TorusGrid& grid, const AtomicTorusMeasure& mu0,
                          double q_max, unsigned long long seed);

struct DualityChain {
  double action_integral = 0.0;   // int A dxi
  double transport_cost = 0.0;    // S_T(xi(0), xi(T))
  double dual_difference = 0.0;   // <xi(0), v(.,0)> - <xi(T), g>
};

// Values under the coupling frozen at eval; S_T uses the same table.
DualityChain duality_chain(const CurveMeasure& xi, const ValueField& vf,
                           const Model& model, const EvaluationCurveTable& eval);

struct EquilibriumReport {
  FixedPointStatus status = FixedPointStatus::kNoConvergence;
  int iterations = 0;
  double alpha = 1.0;
  double residual = 0.0;
  double certificate_gap = 0.0;
  CurveMeasure xi;
  ValueField vf;
  DualityChain chain;
  std::vector<ContinuityResidual> continuity;
  std::optional<AbsContinuityProfile> abs_continuity;
  std::vector<IterateRecord> history;
};

EquilibriumReport certify_equilibrium(const FixedPointState& state,
                                      const Model& model);

}  // namespace mfgt
