#pragma once

#include <span>
#include <vector>

#include "mfgt/torus.hpp"

namespace mfgt {

struct CellAtom {
  int cell = 0;
  double weight = 0.0;
  friend bool operator==(const CellAtom&, const CellAtom&) = default;
};

// Atomic probability measure on grid cells. Atoms are kept sorted by cell
// with duplicates merged; weights are nonnegative and sum to 1 within 1e-12.
class AtomicTorusMeasure {
 public:
  AtomicTorusMeasure() = default;
  explicit AtomicTorusMeasure(std::vector<CellAtom> atoms);

  static AtomicTorusMeasure dirac(int cell);
  static AtomicTorusMeasure uniform(const TorusGrid& grid);
  // Weights proportional to a nonnegative table over all cells.
  static AtomicTorusMeasure from_density(std::span<const double> density);

  std::span<const CellAtom> atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  double total_mass() const;

  // <mu, f> for a table f over cells.
  double integrate(std::span<const double> table) const;

  friend bool operator==(const AtomicTorusMeasure&,
                         const AtomicTorusMeasure&) = default;

 private:
  std::vector<CellAtom> atoms_;
};

// Per time index k = 0..n_t, the push-forward of a curve measure under
// evaluation at t_k.
struct EvaluationCurveTable {
  std::vector<AtomicTorusMeasure> slices;

  // The same measure at every time index.
  static EvaluationCurveTable stationary(const AtomicTorusMeasure& mu,
                                         int n_steps);
  int n_steps() const { return static_cast<int>(slices.size()) - 1; }
};

}  // namespace mfgt
