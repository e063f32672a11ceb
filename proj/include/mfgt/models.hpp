#pragma once

#include <array>
#include <span>
#include <vector>

#include "mfgt/atomic_measure.hpp"
#include "mfgt/torus.hpp"

namespace mfgt {

struct TrigTerm {
  std::array<int, 2> freq{0, 0};
  double cos_coef = 0.0;
  double sin_coef = 0.0;
};

// c + sum_m (a_m cos(2 pi k_m.x) + b_m sin(2 pi k_m.x)).
struct TrigPolynomial {
  double constant = 0.0;
  std::vector<TrigTerm> terms;

  double operator()(const Point& x) const;
  // Upper bound on sup |p|.
  double abs_bound() const;
  bool is_zero() const;

  static TrigPolynomial cosine(double amplitude, std::array<int, 2> freq = {1, 0});
  static TrigPolynomial sine(double amplitude, std::array<int, 2> freq = {1, 0});
  static TrigPolynomial constant_value(double c);
};

// Parameters of the default separable family
//   L(x,mu,q) = |q|^r / r - f(x) - c_F (kappa * mu)(x)
//   H(x,mu,p) = |p|^r* / r* + f(x) + c_F (kappa * mu)(x)
//   g(x,mu)   = g_base(x) + c_g (kappa_g * mu)(x)
struct ModelSpec {
  double r = 2.0;
  double eps0 = 0.5;
  TrigPolynomial f;
  TrigPolynomial kappa;
  TrigPolynomial kappa_g;
  double c_F = 0.0;
  double c_g = 0.0;
  TrigPolynomial g_base;

  // Throws Error(kInvalidArgument) when r <= 1, eps0 <= 0, 1 + eps0 >= r or
  // c_F < 0.
  void validate() const;
  bool decoupled() const;
};

struct ConstantsTable {
  double M0 = 0.0;    // max |L(x,t,0)|
  double m_L = 0.0;   // min L over (x,t,q)
  double osc_g = 0.0; // max g - min g of the active final datum
};

class Model {
 public:
  Model(ModelSpec spec, TorusGrid grid);

  const ModelSpec& spec() const { return spec_; }
  const TorusGrid& grid() const { return grid_; }

  double kinetic(const Vec& q) const;
  double kinetic_conjugate(const Vec& p) const;
  // Gradient of the kinetic part of H, i.e. H_p(x,mu,p).
  Vec hamiltonian_gradient(const Vec& p) const;
  double conjugate_exponent() const { return r_star_; }

  double coupling(const Point& x, const AtomicTorusMeasure& mu) const;
  double potential(const Point& x, const AtomicTorusMeasure& mu) const;
  double lagrangian(const Point& x, const AtomicTorusMeasure& mu,
                    const Vec& q) const {
    return kinetic(q) - potential(x, mu);
  }
  double hamiltonian(const Point& x, const AtomicTorusMeasure& mu,
                     const Vec& p) const {
    return kinetic_conjugate(p) + potential(x, mu);
  }

  double final_datum(const Point& x, const AtomicTorusMeasure& mu) const;
  std::vector<double> final_datum_table(const AtomicTorusMeasure& mu) const;
  // Potential at every (cell, k): index k * num_cells + cell.
  std::vector<double> potential_table(const EvaluationCurveTable& eval) const;

  ConstantsTable constants(const EvaluationCurveTable& eval,
                           std::span<const double> final_datum) const;

  // Measure-independent bounds for M0 and osc(g).
  double potential_bound() const;
  double final_datum_oscillation_bound() const;

  // Velocity cap: solve dt * |q|^r / r = osc(g) + 2 M0 T (any single step of
  // an optimal path satisfies it), then double. Never below dx / dt.
  double default_q_max() const;

 private:
  ModelSpec spec_;
  TorusGrid grid_;
  double r_star_;
};

}  // namespace mfgt
