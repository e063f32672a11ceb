#pragma once

#include <array>
#include <cmath>
#include <span>
#include <vector>

namespace mfgt {

// Vector in R^N, N in {1,2}. Unused trailing components are kept at zero so
// norms and dot products are dimension-agnostic.
struct Vec {
  std::array<double, 2> c{0.0, 0.0};

  double& operator[](int d) { return c[static_cast<std::size_t>(d)]; }
  double operator[](int d) const { return c[static_cast<std::size_t>(d)]; }

  double dot(const Vec& o) const { return c[0] * o.c[0] + c[1] * o.c[1]; }
  double norm() const { return std::hypot(c[0], c[1]); }

  friend Vec operator+(Vec a, const Vec& b) {
    a.c[0] += b.c[0];
    a.c[1] += b.c[1];
    return a;
  }
  friend Vec operator-(Vec a, const Vec& b) {
    a.c[0] -= b.c[0];
    a.c[1] -= b.c[1];
    return a;
  }
  friend Vec operator*(double s, Vec a) {
    a.c[0] *= s;
    a.c[1] *= s;
    return a;
  }
  friend Vec operator/(Vec a, double s) {
    a.c[0] /= s;
    a.c[1] /= s;
    return a;
  }
  friend bool operator==(const Vec&, const Vec&) = default;
};

// A point of the unit torus, canonical representative in [0,1)^N.
using Point = Vec;

// Minimal representative of a difference of torus points; every component
// lies in (-0.5, 0.5].
using PeriodicVector = Vec;

Point wrap_point(Point x);

// Minimal-norm representative of y - x modulo 1, componentwise. The
// boundary tie |component| = 0.5 resolves to +0.5.
PeriodicVector periodic_displacement(const Point& x, const Point& y);

// Relative slack used whenever a distance is compared against a stencil
// radius, so that |delta| == q_max * dt is reachable despite roundoff.
inline bool within_radius(double distance, double radius) {
  return distance <= radius * (1.0 + 1e-12) + 1e-15;
}

using CellIndex = std::array<int, 2>;

class TorusGrid {
 public:
  TorusGrid(int dim, int cells_per_dim, int n_steps, double horizon);

  int dim() const { return dim_; }
  int cells_per_dim() const { return n_x_; }
  int num_cells() const { return num_cells_; }
  int n_steps() const { return n_t_; }
  double horizon() const { return horizon_; }
  double dx() const { return dx_; }
  double dt() const { return dt_; }
  double time(int k) const { return dt_ * k; }

  Point center(int cell) const;
  CellIndex multi_index(int cell) const;
  // Flat (lexicographic) index; components wrap modulo n_x.
  int flat_index(CellIndex idx) const;
  int shift(int cell, CellIndex offset) const;
  // Cell whose center is nearest to x.
  int locate(const Point& x) const;

  friend bool operator==(const TorusGrid&, const TorusGrid&) = default;

 private:
  int dim_;
  int n_x_;
  int n_t_;
  double horizon_;
  double dx_;
  double dt_;
  int num_cells_;
};

// Multilinear periodic interpolation of a cell-center table.
double interpolate(const TorusGrid& grid, std::span<const double> field,
                   const Point& x);

// (f[i+e_d] - f[i-e_d]) / (2 dx) per dimension, periodic.
Vec central_gradient(const TorusGrid& grid, std::span<const double> field,
                     int cell);

// One-sided differences (f[i+e_d]-f[i])/dx and (f[i]-f[i-e_d])/dx.
struct OneSidedGradient {
  Vec forward;
  Vec backward;
};
OneSidedGradient one_sided_gradient(const TorusGrid& grid,
                                    std::span<const double> field, int cell);

// Integer cell offsets reachable in one time step: all minimal-representative
// offsets o with |o * dx| <= radius.
class Stencil {
 public:
  Stencil(const TorusGrid& grid, double radius);

  double radius() const { return radius_; }
  std::span<const CellIndex> offsets() const { return offsets_; }
  bool empty() const { return offsets_.size() <= 1; }

 private:
  double radius_;
  std::vector<CellIndex> offsets_;
};

}  // namespace mfgt
