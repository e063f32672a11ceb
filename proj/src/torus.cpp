#include "mfgt/torus.hpp"

#include <algorithm>

#include "mfgt/error.hpp"

namespace mfgt {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyStencil: return "empty-stencil";
    case ErrorCode::kNonfiniteValue: return "nonfinite-value";
    case ErrorCode::kUnreachable: return "unreachable";
    case ErrorCode::kSizeCap: return "size-cap";
    case ErrorCode::kInfeasibleCost: return "infeasible-cost";
    case ErrorCode::kNotOptimalSupport: return "not-optimal-support";
    case ErrorCode::kCoverageGap: return "coverage-gap";
    case ErrorCode::kInvalidMeasure: return "invalid-measure";
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kDimensionMismatch: return "dimension-mismatch";
  }
  return "unknown";
}

namespace {

int wrap_index(int i, int n) {
  int r = i % n;
  return r < 0 ? r + n : r;
}

double wrap_unit(double x) {
  double r = x - std::floor(x);
  return r >= 1.0 ? 0.0 : r;
}

}  // namespace

Point wrap_point(Point x) {
  x[0] = wrap_unit(x[0]);
  x[1] = wrap_unit(x[1]);
  return x;
}

PeriodicVector periodic_displacement(const Point& x, const Point& y) {
  PeriodicVector d;
  for (int k = 0; k < 2; ++k) {
    double delta = y[k] - x[k];
    delta -= std::ceil(delta - 0.5);
    d[k] = delta;
  }
  return d;
}

TorusGrid::TorusGrid(int dim, int cells_per_dim, int n_steps, double horizon)
    : dim_(dim),
      n_x_(cells_per_dim),
      n_t_(n_steps),
      horizon_(horizon),
      dx_(0.0),
      dt_(0.0),
      num_cells_(0) {
  if (dim != 1 && dim != 2) {
    throw Error(ErrorCode::kInvalidArgument, "grid dim must be 1 or 2");
  }
  if (cells_per_dim < 1 || n_steps < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "grid needs n_x >= 1 and n_t >= 1");
  }
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw Error(ErrorCode::kInvalidArgument, "horizon must be positive");
  }
  dx_ = 1.0 / n_x_;
  dt_ = horizon_ / n_t_;
  num_cells_ = dim_ == 1 ? n_x_ : n_x_ * n_x_;
}

CellIndex TorusGrid::multi_index(int cell) const {
  if (dim_ == 1) return {cell, 0};
  return {cell / n_x_, cell % n_x_};
}

int TorusGrid::flat_index(CellIndex idx) const {
  if (dim_ == 1) return wrap_index(idx[0], n_x_);
  return wrap_index(idx[0], n_x_) * n_x_ + wrap_index(idx[1], n_x_);
}

int TorusGrid::shift(int cell, CellIndex offset) const {
  CellIndex idx = multi_index(cell);
  return flat_index({idx[0] + offset[0], idx[1] + offset[1]});
}

Point TorusGrid::center(int cell) const {
  CellIndex idx = multi_index(cell);
  Point p;
  p[0] = (idx[0] + 0.5) * dx_;
  if (dim_ == 2) p[1] = (idx[1] + 0.5) * dx_;
  return p;
}

int TorusGrid::locate(const Point& x) const {
  Point w = wrap_point(x);
  CellIndex idx{0, 0};
  for (int d = 0; d < dim_; ++d) {
    idx[d] = static_cast<int>(std::floor(w[d] / dx_));
  }
  return flat_index(idx);
}

namespace {

// Position of x in "cell coordinates": base index and fractional weight
// toward base + 1. Fractions within 1e-12 of an integer snap, so grid values
// are reproduced exactly at centers.
void cell_coordinate(double x, double dx, int& base, double& frac) {
  double s = x / dx - 0.5;
  double fl = std::floor(s);
  frac = s - fl;
  base = static_cast<int>(fl);
  if (frac < 1e-12) {
    frac = 0.0;
  } else if (frac > 1.0 - 1e-12) {
    frac = 0.0;
    base += 1;
  }
}

}  // namespace

double interpolate(const TorusGrid& grid, std::span<const double> field,
                   const Point& x) {
  Point w = wrap_point(x);
  int b0 = 0;
  double f0 = 0.0;
  cell_coordinate(w[0], grid.dx(), b0, f0);
  if (grid.dim() == 1) {
    double lo = field[static_cast<std::size_t>(grid.flat_index({b0, 0}))];
    if (f0 == 0.0) return lo;
    double hi = field[static_cast<std::size_t>(grid.flat_index({b0 + 1, 0}))];
    return (1.0 - f0) * lo + f0 * hi;
  }
  int b1 = 0;
  double f1 = 0.0;
  cell_coordinate(w[1], grid.dx(), b1, f1);
  auto at = [&](int a, int b) {
    return field[static_cast<std::size_t>(grid.flat_index({a, b}))];
  };
  double v00 = at(b0, b1);
  if (f0 == 0.0 && f1 == 0.0) return v00;
  return (1.0 - f0) * (1.0 - f1) * v00 + f0 * (1.0 - f1) * at(b0 + 1, b1) +
         (1.0 - f0) * f1 * at(b0, b1 + 1) + f0 * f1 * at(b0 + 1, b1 + 1);
}

Vec central_gradient(const TorusGrid& grid, std::span<const double> field,
                     int cell) {
  Vec g;
  for (int d = 0; d < grid.dim(); ++d) {
    CellIndex e{0, 0};
    e[d] = 1;
    CellIndex m{0, 0};
    m[d] = -1;
    double up = field[static_cast<std::size_t>(grid.shift(cell, e))];
    double down = field[static_cast<std::size_t>(grid.shift(cell, m))];
    g[d] = (up - down) / (2.0 * grid.dx());
  }
  return g;
}

OneSidedGradient one_sided_gradient(const TorusGrid& grid,
                                    std::span<const double> field, int cell) {
  OneSidedGradient out;
  double here = field[static_cast<std::size_t>(cell)];
  for (int d = 0; d < grid.dim(); ++d) {
    CellIndex e{0, 0};
    e[d] = 1;
    CellIndex m{0, 0};
    m[d] = -1;
    out.forward[d] =
        (field[static_cast<std::size_t>(grid.shift(cell, e))] - here) /
        grid.dx();
    out.backward[d] =
        (here - field[static_cast<std::size_t>(grid.shift(cell, m))]) /
        grid.dx();
  }
  return out;
}

Stencil::Stencil(const TorusGrid& grid, double radius) : radius_(radius) {
  const int n = grid.cells_per_dim();
  // Minimal representatives in (-n/2, n/2].
  const int lo = -((n - 1) / 2);
  const int hi = n / 2;
  const int hi1 = grid.dim() == 2 ? hi : 0;
  const int lo1 = grid.dim() == 2 ? lo : 0;
  for (int a = lo; a <= hi; ++a) {
    for (int b = lo1; b <= hi1; ++b) {
      double dist = std::hypot(a * grid.dx(), b * grid.dx());
      if (within_radius(dist, radius)) offsets_.push_back({a, b});
    }
  }
}

}  // namespace mfgt
