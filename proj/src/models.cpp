#include "mfgt/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mfgt/error.hpp"

namespace mfgt {

double TrigPolynomial::operator()(const Point& x) const {
  double s = constant;
  for (const TrigTerm& t : terms) {
    double phase = 2.0 * std::numbers::pi * (t.freq[0] * x[0] + t.freq[1] * x[1]);
    if (t.cos_coef != 0.0) s += t.cos_coef * std::cos(phase);
    if (t.sin_coef != 0.0) s += t.sin_coef * std::sin(phase);
  }
  return s;
}

double TrigPolynomial::abs_bound() const {
  double b = std::abs(constant);
  for (const TrigTerm& t : terms) b += std::hypot(t.cos_coef, t.sin_coef);
  return b;
}

bool TrigPolynomial::is_zero() const {
  if (constant != 0.0) return false;
  return std::all_of(terms.begin(), terms.end(), [](const TrigTerm& t) {
    return t.cos_coef == 0.0 && t.sin_coef == 0.0;
  });
}

TrigPolynomial TrigPolynomial::cosine(double amplitude, std::array<int, 2> freq) {
  return TrigPolynomial{0.0, {TrigTerm{freq, amplitude, 0.0}}};
}

TrigPolynomial TrigPolynomial::sine(double amplitude, std::array<int, 2> freq) {
  return TrigPolynomial{0.0, {TrigTerm{freq, 0.0, amplitude}}};
}

TrigPolynomial TrigPolynomial::constant_value(double c) {
  return TrigPolynomial{c, {}};
}

void ModelSpec::validate() const {
  if (!(r > 1.0)) throw Error(ErrorCode::kInvalidArgument, "r must exceed 1");
  if (!(eps0 > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "eps0 must be positive");
  }
  if (!(1.0 + eps0 < r)) {
    throw Error(ErrorCode::kInvalidArgument, "need 1 + eps0 < r");
  }
  if (c_F < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "c_F must be nonnegative");
  }
}

bool ModelSpec::decoupled() const {
  return (c_F == 0.0 || kappa.is_zero()) && (c_g == 0.0 || kappa_g.is_zero());
}

Model::Model(ModelSpec spec, TorusGrid grid)
    : spec_(std::move(spec)), grid_(grid), r_star_(0.0) {
  spec_.validate();
  r_star_ = spec_.r / (spec_.r - 1.0);
}

double Model::kinetic(const Vec& q) const {
  if (spec_.r == 2.0) return 0.5 * q.dot(q);
  return std::pow(q.norm(), spec_.r) / spec_.r;
}

double Model::kinetic_conjugate(const Vec& p) const {
  if (spec_.r == 2.0) return 0.5 * p.dot(p);
  return std::pow(p.norm(), r_star_) / r_star_;
}

Vec Model::hamiltonian_gradient(const Vec& p) const {
  if (spec_.r == 2.0) return p;
  double n = p.norm();
  if (n == 0.0) return Vec{};
  return std::pow(n, r_star_ - 2.0) * p;
}

double Model::coupling(const Point& x, const AtomicTorusMeasure& mu) const {
  double s = 0.0;
  for (const CellAtom& a : mu.atoms()) {
    s += a.weight * spec_.kappa(x - grid_.center(a.cell));
  }
  return s;
}

double Model::potential(const Point& x, const AtomicTorusMeasure& mu) const {
  double v = spec_.f(x);
  if (spec_.c_F != 0.0) v += spec_.c_F * coupling(x, mu);
  return v;
}

double Model::final_datum(const Point& x, const AtomicTorusMeasure& mu) const {
  double g = spec_.g_base(x);
  if (spec_.c_g != 0.0) {
    double s = 0.0;
    for (const CellAtom& a : mu.atoms()) {
      s += a.weight * spec_.kappa_g(x - grid_.center(a.cell));
    }
    g += spec_.c_g * s;
  }
  return g;
}

std::vector<double> Model::final_datum_table(
    const AtomicTorusMeasure& mu) const {
  std::vector<double> g(static_cast<std::size_t>(grid_.num_cells()));
  for (int i = 0; i < grid_.num_cells(); ++i) {
    g[static_cast<std::size_t>(i)] = final_datum(grid_.center(i), mu);
  }
  return g;
}

std::vector<double> Model::potential_table(
    const EvaluationCurveTable& eval) const {
  const int n = grid_.num_cells();
  const int nt = grid_.n_steps();
  if (eval.n_steps() != nt) {
    throw Error(ErrorCode::kDimensionMismatch,
                "evaluation curve has wrong number of time slices");
  }
  std::vector<double> pot(static_cast<std::size_t>(n) * (nt + 1));
  for (int k = 0; k <= nt; ++k) {
    const AtomicTorusMeasure& mu = eval.slices[static_cast<std::size_t>(k)];
    for (int i = 0; i < n; ++i) {
      pot[static_cast<std::size_t>(k) * n + i] = potential(grid_.center(i), mu);
    }
  }
  return pot;
}

ConstantsTable Model::constants(const EvaluationCurveTable& eval,
                                std::span<const double> final_datum) const {
  std::vector<double> pot = potential_table(eval);
  ConstantsTable c;
  auto [lo, hi] = std::minmax_element(pot.begin(), pot.end());
  // L(x,t,0) = -potential; the kinetic term is minimized at q = 0.
  c.M0 = std::max(std::abs(*lo), std::abs(*hi));
  c.m_L = -*hi;
  auto [glo, ghi] = std::minmax_element(final_datum.begin(), final_datum.end());
  c.osc_g = *ghi - *glo;
  return c;
}

double Model::potential_bound() const {
  return spec_.f.abs_bound() + spec_.c_F * spec_.kappa.abs_bound();
}

double Model::final_datum_oscillation_bound() const {
  return 2.0 * (spec_.g_base.abs_bound() +
                std::abs(spec_.c_g) * spec_.kappa_g.abs_bound());
}

double Model::default_q_max() const {
  const double budget = final_datum_oscillation_bound() +
                        2.0 * potential_bound() * grid_.horizon();
  const double q = std::pow(spec_.r * budget / grid_.dt(), 1.0 / spec_.r);
  return std::max(2.0 * q, grid_.dx() / grid_.dt());
}

}  // namespace mfgt
