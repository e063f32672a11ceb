#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "mfgt/error.hpp"
#include "mfgt/hj.hpp"
#include "mfgt/paths.hpp"
#include "oracles.hpp"

namespace mfgt {
namespace {

Model coupled_model(int dim, int n_x, int n_t) {
  ModelSpec s;
  s.f = TrigPolynomial::sine(0.7, {1, dim == 2 ? 1 : 0});
  s.kappa = TrigPolynomial::cosine(1.0);
  s.c_F = 0.3;
  s.g_base = TrigPolynomial::cosine(0.9);
  s.kappa_g = TrigPolynomial::sine(1.0);
  s.c_g = 0.2;
  return Model(s, TorusGrid(dim, n_x, n_t, 1.0));
}

// A different measure at every time index.
EvaluationCurveTable moving_eval(const TorusGrid& g, std::mt19937_64& rng) {
  EvaluationCurveTable e;
  for (int k = 0; k <= g.n_steps(); ++k) e.slices.push_back(oracle::random_measure(g, 2, rng));
  return e;
}

void expect_matches_enumeration(const Model& m, double q_max, unsigned seed) {
  std::mt19937_64 rng(seed);
  const EvaluationCurveTable eval = moving_eval(m.grid(), rng);
  const std::vector<double> datum = m.final_datum_table(eval.slices.back());
  const ValueField vf = solve_backward(m, eval, datum, q_max);
  for (int s = 0; s < m.grid().num_cells(); ++s) {
    const oracle::BrutePath best = oracle::enumerate_paths(m, eval, datum, q_max, s);
    EXPECT_NEAR(vf.value(s, 0), best.value, 1e-12) << "start " << s;
    EXPECT_EQ(extract_optimal_curve(vf, s).nodes, best.nodes) << "start " << s;
  }
}

TEST(SolveBackward, MatchesEnumeration1D) {
  const Model m = coupled_model(1, 6, 3);
  expect_matches_enumeration(m, 1.0 / (6 * m.grid().dt()), 11);
  // two cells per step
  expect_matches_enumeration(m, 2.0 / (6 * m.grid().dt()), 12);
}

TEST(SolveBackward, MatchesEnumeration2D) {
  const Model m = coupled_model(2, 3, 3);
  expect_matches_enumeration(m, 1.0 / (3 * m.grid().dt()), 13);
  // diagonals
  expect_matches_enumeration(m, std::sqrt(2.0) / (3 * m.grid().dt()), 14);
}

TEST(SolveBackward, ZeroModelZeroDatum) {
  const Model m(ModelSpec{}, TorusGrid(2, 6, 5, 1.0));
  const EvaluationCurveTable eval = EvaluationCurveTable::stationary(AtomicTorusMeasure::dirac(0), 5);
  const ValueField vf = solve_backward(m, eval, std::vector<double>(36, 0.0), m.default_q_max());
  for (int k = 0; k <= 5; ++k) {
    for (int i = 0; i < 36; ++i) {
      EXPECT_EQ(vf.value(i, k), 0.0);
      if (k < 5) EXPECT_EQ(vf.successor(i, k), i);
    }
  }
}

class SolveBackwardFixture : public ::testing::Test {
 protected:
  SolveBackwardFixture() : model(coupled_model(1, 24, 12)) {
    std::mt19937_64 rng(5);
    eval = moving_eval(model.grid(), rng);
    q_max = model.default_q_max();
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 24; ++i) {
      g1.push_back(u(rng));
      g2.push_back(g1.back() + 0.5 * (u(rng) + 1.0));
    }
  }
  Model model;
  EvaluationCurveTable eval;
  double q_max = 0.0;
  std::vector<double> g1, g2;
};

TEST_F(SolveBackwardFixture, ConstantShift) {
  std::vector<double> shifted = g1;
  for (double& v : shifted) v += 2.5;
  const ValueField a = solve_backward(model, eval, g1, q_max);
  const ValueField b = solve_backward(model, eval, shifted, q_max);
  for (int k = 0; k <= 12; ++k) {
    for (int i = 0; i < 24; ++i) EXPECT_NEAR(b.value(i, k) - a.value(i, k), 2.5, 1e-12);
  }
}

TEST_F(SolveBackwardFixture, MonotoneAndNonExpansive) {
  const ValueField a = solve_backward(model, eval, g1, q_max);
  const ValueField b = solve_backward(model, eval, g2, q_max);
  double sup_g = 0.0;
  for (int i = 0; i < 24; ++i) sup_g = std::max(sup_g, std::abs(g1[i] - g2[i]));
  for (int k = 0; k <= 12; ++k) {
    for (int i = 0; i < 24; ++i) {
      EXPECT_LE(a.value(i, k), b.value(i, k));
      EXPECT_LE(std::abs(a.value(i, k) - b.value(i, k)), sup_g + 1e-12);
    }
  }
}

TEST_F(SolveBackwardFixture, RandomPathsNeverBeatTheValue) {
  const ValueField vf = solve_backward(model, eval, g1, q_max);
  const Stencil st(model.grid(), q_max * model.grid().dt());
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<std::size_t> pick(0, st.offsets().size() - 1);
  std::uniform_int_distribution<int> start(0, 23);
  for (int t = 0; t < 100; ++t) {
    DiscreteCurve c;
    c.nodes.push_back(start(rng));
    for (int k = 0; k < 12; ++k) c.nodes.push_back(model.grid().shift(c.nodes.back(), st.offsets()[pick(rng)]));
    const double cost = action_of(c, model, eval) + g1[static_cast<std::size_t>(c.end())];
    EXPECT_GE(cost, vf.value(c.start(), 0) - 1e-12);
    // suffix form
    for (int k = 1; k < 12; ++k) {
      EXPECT_GE(partial_action(c, model, eval, k, 12) + g1[static_cast<std::size_t>(c.end())],
                vf.value(c.nodes[static_cast<std::size_t>(k)], k) - 1e-12);
    }
  }
}

TEST_F(SolveBackwardFixture, StayPutBound) {
  const ValueField vf = solve_backward(model, eval, g1, q_max);
  for (int i = 0; i < 24; ++i) {
    double acc = g1[static_cast<std::size_t>(i)];
    for (int k = 11; k >= 0; --k) {
      acc += step_lagrangian_cost(model, eval, i, i, k);
      EXPECT_LE(vf.value(i, k), acc + 1e-12);
    }
  }
}

TEST_F(SolveBackwardFixture, ProgrammingPrincipleAlongOptimalCurves) {
  const ValueField vf = solve_backward(model, eval, g1, q_max);
  for (int s = 0; s < 24; ++s) {
    const DiscreteCurve c = extract_optimal_curve(vf, s);
    EXPECT_LE(dpp_check(vf, model, eval, c), 1e-12);
    EXPECT_NEAR(*c.action + g1[static_cast<std::size_t>(c.end())], vf.value(s, 0), 1e-12);
  }
  // a non-optimal curve violates it
  DiscreteCurve stay = DiscreteCurve::constant(0, 12);
  if (stay.nodes != extract_optimal_curve(vf, 0).nodes) {
    EXPECT_GT(dpp_check(vf, model, eval, stay), 0.0);
  }
}

TEST_F(SolveBackwardFixture, StabilityUnderDatumConvergence) {
  std::vector<std::vector<double>> seq;
  for (int n = 1; n <= 4; ++n) {
    std::vector<double> g = g1;
    for (double& v : g) v += 1.0 / (n * n);
    seq.push_back(g);
  }
  seq.push_back(g1);
  const std::vector<double> gaps = stability_check(model, eval, seq, q_max);
  ASSERT_EQ(gaps.size(), 5u);
  for (int n = 1; n <= 4; ++n) EXPECT_NEAR(gaps[static_cast<std::size_t>(n - 1)], 1.0 / (n * n), 1e-12);
  EXPECT_EQ(gaps.back(), 0.0);
}

TEST(SolveBackward, Errors) {
  const Model m = coupled_model(1, 8, 4);
  const EvaluationCurveTable eval = EvaluationCurveTable::stationary(AtomicTorusMeasure::dirac(0), 4);
  const std::vector<double> datum(8, 0.0);
  try {
    solve_backward(m, eval, datum, 0.5 * 4.0 / 8.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyStencil);
  }
  std::vector<double> bad = datum;
  bad[3] = std::numeric_limits<double>::quiet_NaN();
  try {
    solve_backward(m, eval, bad, 10.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonfiniteValue);
  }
  try {
    solve_backward(m, eval, std::vector<double>(7, 0.0), 10.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
}

}  // namespace
}  // namespace mfgt
