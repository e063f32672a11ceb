#pragma once

#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "mfgt/atomic_measure.hpp"
#include "mfgt/models.hpp"
#include "mfgt/torus.hpp"

namespace mfgt {

// Symmetric Cartesian grid {-R, ..., R}^dim with spacing h (R rounded to a
// multiple of h). Points are ordered lexicographically.
class QGrid {
 public:
  QGrid(int dim, double radius, double spacing);

  int dim() const { return dim_; }
  double radius() const { return radius_; }
  double spacing() const { return spacing_; }
  int points_per_dim() const { return 2 * half_ + 1; }
  std::span<const Vec> points() const { return points_; }
  // True when the point lies on the outer face of the box.
  bool on_boundary(std::size_t index) const;

 private:
  int dim_;
  int half_;
  double spacing_;
  double radius_;
  std::vector<Vec> points_;
};

using ScalarFunction = std::function<double(const Vec&)>;

std::vector<double> tabulate(const ScalarFunction& fn, const QGrid& grid);

// L_beta(q) = min(L(x,mu,q), beta |q| + beta0) at a frozen (x, mu).
class PerturbedLagrangian {
 public:
  PerturbedLagrangian(const Model& model, Point x, AtomicTorusMeasure mu,
                      double beta, double beta0);

  // max_i L(x_i, mu, 0) + 1 over grid cells.
  static double default_beta0(const Model& model, const AtomicTorusMeasure& mu);

  double beta() const { return beta_; }
  double beta0() const { return beta0_; }
  double base(const Vec& q) const;
  double operator()(const Vec& q) const;

 private:
  const Model* model_;
  double potential_;  // potential(x, mu), constant in q
  double beta_;
  double beta0_;
};

struct ConjugateValue {
  double value = 0.0;
  Vec argmax;
  bool argmax_on_boundary = false;
  // Numeric signature of a conjugate equal to +infinity: on radius 2Q the
  // maximum sits on the boundary and beats the radius-Q maximum by more than beta0.
  bool unbounded_direction = false;
};

// max over the grid of p.q - l(q).
ConjugateValue conjugate_on_grid(std::span<const double> l_values,
                                 const QGrid& q_grid, const Vec& p);

ConjugateValue numeric_conjugate(const ScalarFunction& l, const QGrid& q_grid,
                                 const Vec& p, double beta0);

// Discrete biconjugate on the q-grid. The p-search covers the grid points of
// the closed ball of radius beta (same spacing as the q-grid); pass
// beta = +inf to use the largest difference slope of l, rounded up to the
// grid spacing, instead.
std::vector<double> numeric_biconjugate(
    std::span<const double> l_values, const QGrid& q_grid,
    double beta = std::numeric_limits<double>::infinity());

// max over probes |L**_beta - L| for each beta, conjugates taken on q_grid.
std::vector<double> betino_convergence_sweep(const Model& model,
                                             const Point& x,
                                             const AtomicTorusMeasure& mu,
                                             std::span<const Vec> q_probes,
                                             std::span<const double> betas,
                                             const QGrid& q_grid);

}  // namespace mfgt
