#pragma once

#include <span>
#include <utility>
#include <vector>

#include "mfgt/atomic_measure.hpp"
#include "mfgt/curve.hpp"
#include "mfgt/hj.hpp"
#include "mfgt/models.hpp"
#include "mfgt/paths.hpp"
#include "mfgt/torus.hpp"
#include "mfgt/transport.hpp"

namespace mfgt {

struct CurveAtom {
  DiscreteCurve curve;
  double weight = 0.0;
};

// Atomic probability measure on grid paths. Atoms with identical node lists
// are merged and kept in lexicographic order of their nodes.
class CurveMeasure {
 public:
  CurveMeasure() = default;
  explicit CurveMeasure(std::vector<CurveAtom> atoms);

  // Every atom of mu on a constant curve.
  static CurveMeasure stationary(const AtomicTorusMeasure& mu, int n_steps);

  std::span<const CurveAtom> atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  int n_steps() const;
  double total_mass() const;

  AtomicTorusMeasure at_time(int k) const;
  AtomicTorusMeasure initial() const { return at_time(0); }
  AtomicTorusMeasure terminal() const { return at_time(n_steps()); }

  bool stencil_feasible(const TorusGrid& grid, double q_max) const;

 private:
  std::vector<CurveAtom> atoms_;
};

// (1 - alpha) a + alpha b.
CurveMeasure mix(const CurveMeasure& a, const CurveMeasure& b, double alpha);

EvaluationCurveTable evaluation_curve(const CurveMeasure& xi);

inline constexpr std::size_t kDefaultAtomCap = 4096;

// Exact W1 with the periodic Euclidean ground metric between cell centers.
double wasserstein1(const TorusGrid& grid, const AtomicTorusMeasure& mu,
                    const AtomicTorusMeasure& nu,
                    std::size_t atom_cap = kDefaultAtomCap);

// max_k |periodic_displacement(z_k, w_k)|.
double uniform_distance(const TorusGrid& grid, const DiscreteCurve& a,
                        const DiscreteCurve& b);

// Exact W1 on curve space with the uniform ground metric.
double wasserstein1_curves(const TorusGrid& grid, const CurveMeasure& xi1,
                           const CurveMeasure& xi2,
                           std::size_t atom_cap = kDefaultAtomCap);

// min over plans of sum S(x,y) gamma(x,y). Plan indices refer to atom
// positions of mu and nu. Throws Error(kInfeasibleCost) when some pair of
// support points has a sentinel cost.
TransportPlan transport_cost(const AtomicTorusMeasure& mu,
                             const AtomicTorusMeasure& nu, const CostMatrix& S);

struct CertificateReport {
  double action_integral = 0.0;    // int A dxi
  double initial_value = 0.0;      // <xi(0), v(.,0)>
  double final_datum_value = 0.0;  // <xi(T), g>
  double gap = 0.0;                // action - (initial - final)
  std::vector<double> atom_gaps;   // per atom, same order as xi.atoms()
};

// Kantorovich-type optimality certificate of xi against a value field solved
// with the same model and evaluation curve. The gap is nonnegative up to
// roundoff and vanishes exactly on measures supported on optimal curves.
CertificateReport optimality_certificate(const CurveMeasure& xi,
                                         const ValueField& vf,
                                         const Model& model,
                                         const EvaluationCurveTable& eval);

struct StartGroup {
  int cell = 0;
  double mass = 0.0;
  CurveMeasure conditional;
};

// Disintegration with respect to the starting point.
std::vector<StartGroup> group_by_start(const CurveMeasure& xi);
CurveMeasure recombine(std::span<const StartGroup> groups);

}  // namespace mfgt
