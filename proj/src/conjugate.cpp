#include "mfgt/conjugate.hpp"

#include <algorithm>
#include <cmath>

#include "mfgt/error.hpp"

namespace mfgt {

QGrid::QGrid(int dim, double radius, double spacing)
    : dim_(dim), half_(0), spacing_(spacing), radius_(0.0) {
  if (dim != 1 && dim != 2) {
    throw Error(ErrorCode::kInvalidArgument, "q-grid dim must be 1 or 2");
  }
  if (!(spacing > 0.0) || !(radius >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "q-grid needs positive spacing and nonnegative radius");
  }
  half_ = static_cast<int>(std::llround(radius / spacing));
  radius_ = half_ * spacing_;
  const int n = points_per_dim();
  points_.reserve(static_cast<std::size_t>(dim == 1 ? n : n * n));
  for (int a = -half_; a <= half_; ++a) {
    if (dim == 1) {
      points_.push_back(Vec{{a * spacing_, 0.0}});
      continue;
    }
    for (int b = -half_; b <= half_; ++b) {
      points_.push_back(Vec{{a * spacing_, b * spacing_}});
    }
  }
}

bool QGrid::on_boundary(std::size_t index) const {
  const int n = points_per_dim();
  auto edge = [&](int i) { return i == 0 || i == n - 1; };
  if (dim_ == 1) return edge(static_cast<int>(index));
  return edge(static_cast<int>(index) / n) || edge(static_cast<int>(index) % n);
}

std::vector<double> tabulate(const ScalarFunction& fn, const QGrid& grid) {
  std::vector<double> out;
  out.reserve(grid.points().size());
  for (const Vec& q : grid.points()) out.push_back(fn(q));
  return out;
}

PerturbedLagrangian::PerturbedLagrangian(const Model& model, Point x,
                                         AtomicTorusMeasure mu, double beta,
                                         double beta0)
    : model_(&model), potential_(model.potential(x, mu)), beta_(beta), beta0_(beta0) {
  if (!(beta > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "beta must be positive");
  }
}

double PerturbedLagrangian::default_beta0(const Model& model,
                                          const AtomicTorusMeasure& mu) {
  double m = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < model.grid().num_cells(); ++i) {
    m = std::max(m, model.lagrangian(model.grid().center(i), mu, Vec{}));
  }
  return m + 1.0;
}

double PerturbedLagrangian::base(const Vec& q) const {
  return model_->kinetic(q) - potential_;
}

double PerturbedLagrangian::operator()(const Vec& q) const {
  return std::min(base(q), beta_ * q.norm() + beta0_);
}

ConjugateValue conjugate_on_grid(std::span<const double> l_values,
                                 const QGrid& q_grid, const Vec& p) {
  std::span<const Vec> pts = q_grid.points();
  if (l_values.size() != pts.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "table does not match q-grid");
  }
  ConjugateValue out;
  out.value = -std::numeric_limits<double>::infinity();
  std::size_t best = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double v = p.dot(pts[i]) - l_values[i];
    if (v > out.value) {
      out.value = v;
      best = i;
    }
  }
  out.argmax = pts[best];
  out.argmax_on_boundary = q_grid.on_boundary(best);
  return out;
}

ConjugateValue numeric_conjugate(const ScalarFunction& l, const QGrid& q_grid,
                                 const Vec& p, double beta0) {
  ConjugateValue near = conjugate_on_grid(tabulate(l, q_grid), q_grid, p);
  QGrid wide(q_grid.dim(), 2.0 * q_grid.radius(), q_grid.spacing());
  ConjugateValue far = conjugate_on_grid(tabulate(l, wide), wide, p);
  // near argmax may stay interior when |p| barely exceeds the cone slope
  near.unbounded_direction = far.argmax_on_boundary &&
                             far.value - near.value > beta0;
  return near;
}

namespace {

// Largest |finite-difference slope| of a table along grid lines.
double max_grid_slope(std::span<const double> l, const QGrid& g) {
  const int n = g.points_per_dim();
  double s = 0.0;
  if (g.dim() == 1) {
    for (int i = 0; i + 1 < n; ++i) {
      s = std::max(s, std::abs(l[static_cast<std::size_t>(i + 1)] -
                               l[static_cast<std::size_t>(i)]));
    }
  } else {
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        std::size_t i = static_cast<std::size_t>(a * n + b);
        if (a + 1 < n) s = std::max(s, std::abs(l[i + static_cast<std::size_t>(n)] - l[i]));
        if (b + 1 < n) s = std::max(s, std::abs(l[i + 1] - l[i]));
      }
    }
  }
  return s / g.spacing();
}

std::vector<Vec> ball_points(int dim, double beta, double spacing) {
  // Round the box radius up so every grid point of the ball is present.
  QGrid box(dim, std::ceil(beta / spacing - 1e-9) * spacing, spacing);
  std::vector<Vec> out;
  for (const Vec& p : box.points()) {
    if (within_radius(p.norm(), beta)) out.push_back(p);
  }
  return out;
}

std::vector<double> conjugate_table(std::span<const double> l_values,
                                    const QGrid& q_grid,
                                    std::span<const Vec> p_points) {
  std::vector<double> out;
  out.reserve(p_points.size());
  for (const Vec& p : p_points) {
    out.push_back(conjugate_on_grid(l_values, q_grid, p).value);
  }
  return out;
}

double biconjugate_at(const Vec& q, std::span<const Vec> p_points,
                      std::span<const double> l_star) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < p_points.size(); ++j) {
    best = std::max(best, p_points[j].dot(q) - l_star[j]);
  }
  return best;
}

}  // namespace

std::vector<double> numeric_biconjugate(std::span<const double> l_values,
                                        const QGrid& q_grid, double beta) {
  if (std::isinf(beta)) {
    // round up so the steepest chord slope is still covered
    beta = std::ceil(max_grid_slope(l_values, q_grid) / q_grid.spacing() - 1e-9) *
           q_grid.spacing();
  }
  std::vector<Vec> p_points = ball_points(q_grid.dim(), beta, q_grid.spacing());
  std::vector<double> l_star = conjugate_table(l_values, q_grid, p_points);
  std::vector<double> out;
  out.reserve(q_grid.points().size());
  for (const Vec& q : q_grid.points()) {
    out.push_back(biconjugate_at(q, p_points, l_star));
  }
  return out;
}

std::vector<double> betino_convergence_sweep(const Model& model,
                                             const Point& x,
                                             const AtomicTorusMeasure& mu,
                                             std::span<const Vec> q_probes,
                                             std::span<const double> betas,
                                             const QGrid& q_grid) {
  const double beta0 = PerturbedLagrangian::default_beta0(model, mu);
  std::vector<double> gaps;
  gaps.reserve(betas.size());
  for (double beta : betas) {
    PerturbedLagrangian lb(model, x, mu, beta, beta0);
    std::vector<double> table = tabulate(lb, q_grid);
    std::vector<Vec> p_points = ball_points(q_grid.dim(), beta, q_grid.spacing());
    std::vector<double> l_star = conjugate_table(table, q_grid, p_points);
    double gap = 0.0;
    for (const Vec& q : q_probes) {
      double l_bi = biconjugate_at(q, p_points, l_star);
      gap = std::max(gap, std::abs(l_bi - model.lagrangian(x, mu, q)));
    }
    gaps.push_back(gap);
  }
  return gaps;
}

}  // namespace mfgt
