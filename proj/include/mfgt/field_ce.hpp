#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mfgt/atomic_measure.hpp"
#include "mfgt/hj.hpp"
#include "mfgt/measures.hpp"
#include "mfgt/models.hpp"
#include "mfgt/torus.hpp"

namespace mfgt {

enum class FieldSource { kCurveVelocity, kHpOfGradient };

// One sample of the drift field at (cell, k); `atom` indexes the curve
// measure the sample was read from (-1 when not tied to an atom).
struct FieldSample {
  int cell = 0;
  int k = 0;
  Vec velocity;
  FieldSource source = FieldSource::kCurveVelocity;
  int atom = -1;
};

// Drift samples along every atom: delta_k / dt for k < n_t. With
// require_optimal, throws Error(kNotOptimalSupport) when an atom violates
// action = v(start,0) - g(end) by more than 1e-9.
std::vector<FieldSample> field_along_measure(const CurveMeasure& xi,
                                             const ValueField& vf,
                                             const Model& model,
                                             const EvaluationCurveTable& eval,
                                             bool require_optimal = true);

// Largest velocity gap between samples of distinct atoms sharing (cell, k).
double max_collision_gap(std::span<const FieldSample> samples);

struct DirectionalDerivative {
  double g_estimate = 0.0;   // max over h of the difference quotient
  double lagrangian = 0.0;   // L(x, t, q)
  double mismatch = 0.0;     // |g_estimate + lagrangian|
  int quotients_used = 0;
  bool pass = false;
};

// Steps {+-dt, +-2dt, +-4dt}.
std::vector<double> default_h_set(const TorusGrid& grid);

// Difference quotients (v(x + h q, t + h) - v(x, t)) / h for h in h_set, with
// v interpolated in space on the time slice k + h/dt. Steps leaving [0, T]
// are skipped. Each h must be an integer multiple of dt.
DirectionalDerivative directional_derivative_test(
    const ValueField& vf, const Model& model, const EvaluationCurveTable& eval,
    int cell, int k, const Vec& q, std::span<const double> h_set,
    double tol_dd);

struct SampleGap {
  int cell = 0;
  int k = 0;
  double gap = 0.0;
  Vec hp;
  bool kink = false;
};

struct HpComparison {
  std::vector<SampleGap> gaps;
  double median = 0.0;  // over non-kink samples
  double max = 0.0;     // over non-kink samples
  int kink_count = 0;
};

// |velocity - H_p(x, t, -Dv)| per sample, Dv by central differences at fixed
// t_k. Samples whose one-sided difference quotients disagree by more than
// kink_threshold in some direction are flagged and left out of the summary.
HpComparison compare_with_hp(const ValueField& vf,
                             std::span<const FieldSample> samples,
                             const Model& model, double kink_threshold);

struct TestFunction {
  std::string id;
  std::function<double(const Point&, double)> value;
  std::function<double(const Point&, double)> time_derivative;
  std::function<Vec(const Point&, double)> gradient;
};

// Tensor products of {1, sin 2 pi x_d, cos 2 pi x_d} per dimension with
// {1, t, t^2/2}: 9 functions in dim 1, 27 in dim 2.
std::vector<TestFunction> standard_test_family(int dim);

struct ContinuityResidual {
  std::string id;
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
};

// Weak-form residual of the continuity equation driven by the sampled
// field: LHS = sum_k dt sum_a w_a (phi_t + Dphi . velocity) at (z_a(k), t_k),
// RHS = <xi(T), phi(.,T)> - <xi(0), phi(.,0)>. Throws Error(kCoverageGap)
// when an atom lacks a sample at some k < n_t.
std::vector<ContinuityResidual> continuity_residual(
    const TorusGrid& grid, const CurveMeasure& xi,
    std::span<const FieldSample> samples, std::span<const TestFunction> tests);

struct AbsContinuityProfile {
  double exponent = 0.0;        // (1 + eps0)*
  std::vector<double> speeds;   // d_W(xi(t_k), xi(t_{k+1})) / dt
  double norm = 0.0;            // discrete L^exponent norm of speeds
};

AbsContinuityProfile abs_continuity_profile(const TorusGrid& grid,
                                            const CurveMeasure& xi,
                                            double eps0);

}  // namespace mfgt
