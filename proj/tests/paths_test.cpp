#include <cmath>
#include <cstdlib>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "mfgt/error.hpp"
#include "mfgt/paths.hpp"
#include "oracles.hpp"

namespace mfgt {
namespace {

TEST(ExtractOptimalCurve, ReproducesValue) {
  ModelSpec s;
  s.f = TrigPolynomial::cosine(1.0);
  s.g_base = TrigPolynomial::sine(0.5);
  const Model m(s, TorusGrid(1, 20, 10, 1.0));
  const EvaluationCurveTable eval = EvaluationCurveTable::stationary(AtomicTorusMeasure::dirac(0), 10);
  const std::vector<double> datum = m.final_datum_table(AtomicTorusMeasure::dirac(0));
  const ValueField vf = solve_backward(m, eval, datum, m.default_q_max());
  for (int i = 0; i < 20; ++i) {
    const DiscreteCurve c = extract_optimal_curve(vf, i);
    ASSERT_EQ(c.n_steps(), 10);
    EXPECT_EQ(c.start(), i);
    EXPECT_NEAR(*c.action + datum[static_cast<std::size_t>(c.end())], vf.value(i, 0), 1e-12);
    EXPECT_NEAR(action_of(c, m, eval), *c.action, 1e-12);
    EXPECT_TRUE(stencil_feasible(c, m.grid(), m.default_q_max()));
  }
  EXPECT_THROW(extract_optimal_curve(vf, 20), Error);
  EXPECT_THROW(action_of(DiscreteCurve::constant(0, 3), m, eval), Error);
}

TEST(OccupationHistogram, UniformInTime) {
  const DiscreteCurve c{{0, 1, 1, 3, 2}, std::nullopt};
  const OccupationHistogram h = occupation_histogram(c, 4);
  EXPECT_DOUBLE_EQ(h.total_mass(), 1.0);
  for (int k = 0; k < 4; ++k) EXPECT_DOUBLE_EQ(h.time_marginal(k), 0.25);
  EXPECT_DOUBLE_EQ(h.weight(1, 1), 0.25);
  EXPECT_DOUBLE_EQ(h.weight(1, 2), 0.25);
  EXPECT_EQ(h.weight(2, 3), 0.0);
}

TEST(CostMatrix, MatchesPinnedEnumeration) {
  ModelSpec s;
  s.f = TrigPolynomial::sine(0.6);
  s.kappa = TrigPolynomial::cosine(1.0);
  s.c_F = 0.5;
  const Model m(s, TorusGrid(1, 5, 3, 1.0));
  std::mt19937_64 rng(2);
  EvaluationCurveTable eval;
  for (int k = 0; k <= 3; ++k) eval.slices.push_back(oracle::random_measure(m.grid(), 2, rng));
  const double q_max = 0.2 / m.grid().dt();
  const CostMatrix cm = cost_matrix(m, eval, q_max);
  for (int x = 0; x < 5; ++x) {
    for (int y = 0; y < 5; ++y) {
      EXPECT_NEAR(cm.at(x, y), oracle::pinned_minimum(m, eval, q_max, x, y), 1e-12);
    }
  }
}

// No potential: the best split of m cells over n_t steps is as even as
// possible, so S is known in closed form.
TEST(CostMatrix, FreeParticleClosedForm) {
  const int nx = 32;
  const int nt = 4;
  const Model m(ModelSpec{}, TorusGrid(1, nx, nt, 1.0));
  const EvaluationCurveTable eval = EvaluationCurveTable::stationary(AtomicTorusMeasure::dirac(0), nt);
  const double dx = m.grid().dx();
  const double dt = m.grid().dt();
  const CostMatrix cm = cost_matrix(m, eval, 0.5 / dt);
  for (int x = 0; x < nx; ++x) {
    for (int y = 0; y < nx; ++y) {
      int off = ((y - x) % nx + nx) % nx;
      if (off > nx / 2) off = nx - off;
      const int a = off / nt;
      const int b = off % nt;
      const double exact = dx * dx / (2 * dt) * ((nt - b) * a * a + b * (a + 1) * (a + 1));
      EXPECT_NEAR(cm.at(x, y), exact, 1e-12);
      const double d = off * dx;
      EXPECT_GE(cm.at(x, y), d * d / 2 - 1e-12);
      EXPECT_LE(cm.at(x, y), d * d / 2 + dx * dx * nt / (8 * dt) + 1e-12);
    }
  }
}

TEST(CostMatrix, UnreachablePairs) {
  const Model m(ModelSpec{}, TorusGrid(1, 8, 2, 1.0));
  const EvaluationCurveTable eval = EvaluationCurveTable::stationary(AtomicTorusMeasure::dirac(0), 2);
  const double q_max = m.grid().dx() / m.grid().dt();
  try {
    cost_matrix(m, eval, q_max);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnreachable);
  }
  const CostMatrix cm = cost_matrix(m, eval, q_max, false);
  EXPECT_TRUE(cm.finite(0, 2));
  EXPECT_TRUE(cm.finite(0, 6));
  EXPECT_FALSE(cm.finite(0, 3));
  EXPECT_FALSE(cm.finite(0, 4));
}

TEST(CostMatrix, LowerBoundFromLagrangian) {
  ModelSpec s;
  s.f = TrigPolynomial::cosine(0.8);
  const Model m(s, TorusGrid(2, 6, 6, 1.0));
  const AtomicTorusMeasure mu = AtomicTorusMeasure::uniform(m.grid());
  const EvaluationCurveTable eval = EvaluationCurveTable::stationary(mu, 6);
  const CostMatrix cm = cost_matrix(m, eval, m.default_q_max());
  const ConstantsTable c = m.constants(eval, std::vector<double>(36, 0.0));
  for (int x = 0; x < 36; ++x) {
    for (int y = 0; y < 36; ++y) EXPECT_GE(cm.at(x, y), c.m_L * m.grid().horizon() - 1e-12);
    double stay = 0.0;
    for (int k = 0; k < 6; ++k) stay += step_lagrangian_cost(m, eval, x, x, k);
    EXPECT_LE(cm.at(x, x), stay + 1e-12);
  }
}

}  // namespace
}  // namespace mfgt
