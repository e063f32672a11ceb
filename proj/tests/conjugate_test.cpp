#include <algorithm>
#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "mfgt/conjugate.hpp"
#include "mfgt/error.hpp"
#include "oracles.hpp"

namespace mfgt {
namespace {

Model cosine_model(int dim = 1) {
  ModelSpec s;
  s.f = TrigPolynomial::cosine(0.3);
  s.kappa = TrigPolynomial::sine(1.0);
  s.c_F = 0.4;
  return Model(s, TorusGrid(dim, 16, 8, 1.0));
}

TEST(QGrid, LayoutAndBoundary) {
  QGrid g(1, 1.0, 0.25);
  ASSERT_EQ(g.points().size(), 9u);
  EXPECT_EQ(g.points()[0][0], -1.0);
  EXPECT_TRUE(g.on_boundary(0));
  EXPECT_TRUE(g.on_boundary(8));
  EXPECT_FALSE(g.on_boundary(4));
  QGrid g2(2, 0.5, 0.5);
  ASSERT_EQ(g2.points().size(), 9u);
  EXPECT_FALSE(g2.on_boundary(4));
  EXPECT_TRUE(g2.on_boundary(3));
  EXPECT_THROW(QGrid(1, 1.0, 0.0), Error);
}

TEST(Conjugate, MatchesHamiltonianOnFineGrid) {
  const Model m = cosine_model();
  const AtomicTorusMeasure mu({{2, 0.5}, {9, 0.5}});
  const Point x{{0.37, 0}};
  const double h = 0.01;
  QGrid q(1, 8.0, h);
  auto l = [&](const Vec& v) { return m.lagrangian(x, mu, v); };
  for (double p = -3.0; p <= 3.0; p += 0.13) {
    const ConjugateValue c = numeric_conjugate(l, q, Vec{{p, 0}}, 1.0);
    // quadratic kinetic: grid error at most h^2 / 8 in the argmax
    EXPECT_NEAR(c.value, m.hamiltonian(x, mu, Vec{{p, 0}}), h * h / 8 + 1e-12);
    EXPECT_FALSE(c.unbounded_direction);
    EXPECT_FALSE(c.argmax_on_boundary);
  }
}

TEST(Conjugate, TwoDimensionalKinetic) {
  const Model m = cosine_model(2);
  const AtomicTorusMeasure mu = AtomicTorusMeasure::dirac(17);
  const Point x{{0.6, 0.1}};
  QGrid q(2, 3.0, 0.05);
  auto l = [&](const Vec& v) { return m.lagrangian(x, mu, v); };
  for (const Vec p : {Vec{{1.0, -0.5}}, Vec{{0.0, 0.0}}, Vec{{-2.0, 1.5}}}) {
    const ConjugateValue c = numeric_conjugate(l, q, p, 1.0);
    EXPECT_NEAR(c.value, m.hamiltonian(x, mu, p), 2 * 0.05 * 0.05 / 8 + 1e-12);
  }
}

TEST(Conjugate, AtZeroIsMinusMinimum) {
  QGrid q(1, 2.0, 0.1);
  auto l = [](const Vec& v) { return std::cos(3 * v[0]) + 0.1 * v[0]; };
  const std::vector<double> t = tabulate(l, q);
  const ConjugateValue c = conjugate_on_grid(t, q, Vec{});
  EXPECT_EQ(c.value, -*std::min_element(t.begin(), t.end()));
  EXPECT_THROW(conjugate_on_grid(std::vector<double>(3, 0.0), q, Vec{}), Error);
}

TEST(Conjugate, FlagsLinearGrowthBelowSlope) {
  QGrid q(1, 8.0, 0.05);
  auto cone = [](const Vec& v) { return v.norm() + 1.0; };
  EXPECT_TRUE(numeric_conjugate(cone, q, Vec{{2.0, 0}}, 1.0).unbounded_direction);
  EXPECT_TRUE(numeric_conjugate(cone, q, Vec{{-2.0, 0}}, 1.0).unbounded_direction);
  const ConjugateValue inside = numeric_conjugate(cone, q, Vec{{0.5, 0}}, 1.0);
  EXPECT_FALSE(inside.unbounded_direction);
  EXPECT_DOUBLE_EQ(inside.value, -1.0);
}

TEST(Conjugate, FlagsSmallExcessWithInteriorNearMax) {
  // quadratic capped by a slope-0.5 cone; at p = 0.75 the radius-8 max is interior
  QGrid q(1, 8.0, 0.05);
  auto capped = [](const Vec& v) { return std::min(0.5 * v.norm() * v.norm() - 0.5, 0.5 * v.norm() + 1.5); };
  const ConjugateValue c = numeric_conjugate(capped, q, Vec{{0.75, 0}}, 1.5);
  EXPECT_FALSE(c.argmax_on_boundary);
  EXPECT_TRUE(c.unbounded_direction);
  EXPECT_FALSE(numeric_conjugate(capped, q, Vec{{0.45, 0}}, 1.5).unbounded_direction);
}

TEST(Biconjugate, DoubleWellMatchesHull) {
  QGrid q(1, 2.0, 0.1);
  std::vector<double> xs;
  for (const Vec& v : q.points()) xs.push_back(v[0]);
  auto w = [](const Vec& v) {
    return std::min((v[0] - 1) * (v[0] - 1), (v[0] + 1) * (v[0] + 1));
  };
  const std::vector<double> t = tabulate(w, q);
  const std::vector<double> hull = oracle::brute_convex_hull(xs, t);
  const std::vector<double> bi = numeric_biconjugate(t, q);
  ASSERT_EQ(bi.size(), hull.size());
  for (std::size_t i = 0; i < bi.size(); ++i) EXPECT_NEAR(bi[i], hull[i], 1e-9) << xs[i];
  EXPECT_NEAR(bi[10], 0.0, 1e-9);
}

TEST(Biconjugate, ConvexInputIsFixed) {
  QGrid q(1, 3.0, 0.1);
  auto c = [](const Vec& v) { return 0.5 * v[0] * v[0] + 0.2 * v[0]; };
  const std::vector<double> t = tabulate(c, q);
  const std::vector<double> bi = numeric_biconjugate(t, q);
  for (std::size_t i = 0; i < t.size(); ++i) EXPECT_NEAR(bi[i], t[i], 1e-9);
}

TEST(PerturbedLagrangian, SandwichedByBiconjugate) {
  const Model m = cosine_model();
  const AtomicTorusMeasure mu({{0, 0.3}, {7, 0.7}});
  const Point x{{0.8, 0}};
  const double beta0 = PerturbedLagrangian::default_beta0(m, mu);
  QGrid q(1, 8.0, 0.05);
  for (double beta : {0.5, 1.0, 2.0, 4.0}) {
    PerturbedLagrangian lb(m, x, mu, beta, beta0);
    const std::vector<double> t = tabulate(lb, q);
    const std::vector<double> bi = numeric_biconjugate(t, q, beta);
    for (std::size_t i = 0; i < t.size(); ++i) {
      const Vec v = q.points()[i];
      EXPECT_LE(bi[i], t[i] + 1e-12);
      EXPECT_LE(t[i], m.lagrangian(x, mu, v));
      EXPECT_EQ(lb.base(v), m.lagrangian(x, mu, v));
    }
  }
  EXPECT_THROW(PerturbedLagrangian(m, x, mu, 0.0, beta0), Error);
}

TEST(PerturbedLagrangian, DefaultOffset) {
  const Model m = cosine_model();
  const AtomicTorusMeasure mu = AtomicTorusMeasure::dirac(3);
  double hi = -1e300;
  for (int i = 0; i < 16; ++i) hi = std::max(hi, -m.potential(m.grid().center(i), mu));
  EXPECT_DOUBLE_EQ(PerturbedLagrangian::default_beta0(m, mu), hi + 1.0);
}

TEST(BetinoSweep, GapShrinksAndVanishes) {
  const Model m = cosine_model();
  const AtomicTorusMeasure mu = AtomicTorusMeasure::dirac(5);
  const Point x{{0.2, 0}};
  QGrid q(1, 8.0, 0.05);
  const std::vector<Vec> probes{Vec{{0.0, 0}}, Vec{{0.5, 0}}, Vec{{-1.0, 0}}, Vec{{2.0, 0}}};
  const std::vector<double> betas{0.5, 1.0, 2.0, 4.0, 8.0};
  const std::vector<double> gaps = betino_convergence_sweep(m, x, mu, probes, betas, q);
  ASSERT_EQ(gaps.size(), betas.size());
  EXPECT_GT(gaps[0], 0.1);
  for (std::size_t i = 1; i < gaps.size(); ++i) EXPECT_LE(gaps[i], gaps[i - 1] + 1e-12);
  EXPECT_LE(gaps[3], 1e-9);
  EXPECT_LE(gaps[4], 1e-9);
}

}  // namespace
}  // namespace mfgt
