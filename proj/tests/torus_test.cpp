#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "mfgt/error.hpp"
#include "mfgt/torus.hpp"

namespace mfgt {
namespace {

using std::numbers::pi;

TEST(PeriodicDisplacement, WrapsToShorterSide) {
  EXPECT_NEAR(periodic_displacement(Vec{{0.1, 0}}, Vec{{0.9, 0}})[0], -0.2, 1e-15);
  EXPECT_EQ(periodic_displacement(Vec{{0.5, 0}}, Vec{{0.5, 0}})[0], 0.0);
  const Vec d = periodic_displacement(Vec{{0.0, 0.0}}, Vec{{0.6, 0.4}});
  EXPECT_NEAR(d[0], -0.4, 1e-15);
  EXPECT_NEAR(d[1], 0.4, 1e-15);
}

TEST(PeriodicDisplacement, HalfTieIsPositive) {
  EXPECT_EQ(periodic_displacement(Vec{{0.25, 0}}, Vec{{0.75, 0}})[0], 0.5);
  EXPECT_EQ(periodic_displacement(Vec{{0.75, 0}}, Vec{{0.25, 0}})[0], 0.5);
}

TEST(PeriodicDisplacement, AntisymmetricAndBounded) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 1000; ++t) {
    const Vec x{{u(rng), u(rng)}};
    const Vec y{{u(rng), u(rng)}};
    const Vec a = periodic_displacement(x, y);
    const Vec b = periodic_displacement(y, x);
    EXPECT_NEAR(a.norm(), b.norm(), 1e-15);
    EXPECT_LE(a.norm(), std::sqrt(2.0) / 2 + 1e-15);
    for (int d = 0; d < 2; ++d) {
      EXPECT_GT(a[d], -0.5);
      EXPECT_LE(a[d], 0.5);
    }
  }
}

TEST(TorusGrid, CentersAndSteps) {
  TorusGrid g(1, 8, 10, 2.0);
  EXPECT_DOUBLE_EQ(g.dx(), 0.125);
  EXPECT_DOUBLE_EQ(g.dt(), 0.2);
  EXPECT_DOUBLE_EQ(g.center(3)[0], 3.5 * 0.125);
  EXPECT_NEAR(g.time(g.n_steps()), 2.0, 1e-15);
  TorusGrid g2(2, 4, 3, 1.0);
  EXPECT_EQ(g2.num_cells(), 16);
  EXPECT_EQ(g2.flat_index({1, 2}), 6);
  EXPECT_EQ(g2.flat_index({-1, 4}), 12);
  EXPECT_EQ(g2.shift(0, {-1, -1}), 15);
  EXPECT_EQ(g2.locate(g2.center(9)), 9);
}

TEST(TorusGrid, RejectsBadShapes) {
  EXPECT_THROW(TorusGrid(3, 4, 4, 1.0), Error);
  EXPECT_THROW(TorusGrid(1, 0, 4, 1.0), Error);
  EXPECT_THROW(TorusGrid(1, 4, 4, 0.0), Error);
}

TEST(Interpolate, ConstantAndCenters) {
  TorusGrid g(2, 5, 1, 1.0);
  std::vector<double> c(25, 3.25);
  EXPECT_DOUBLE_EQ(interpolate(g, c, Vec{{0.37, 0.91}}), 3.25);
  std::vector<double> f;
  for (int i = 0; i < 25; ++i) f.push_back(std::sin(2 * pi * g.center(i)[0]) + g.center(i)[1]);
  for (int i = 0; i < 25; ++i) EXPECT_EQ(interpolate(g, f, g.center(i)), f[static_cast<std::size_t>(i)]);
}

TEST(Interpolate, MidpointIsMean) {
  TorusGrid g(1, 16, 1, 1.0);
  std::vector<double> f;
  for (int i = 0; i < 16; ++i) f.push_back(std::cos(2 * pi * g.center(i)[0]));
  for (int i = 0; i < 16; ++i) {
    const int j = (i + 1) % 16;
    const double mid = g.center(i)[0] + 0.5 * g.dx();
    EXPECT_NEAR(interpolate(g, f, wrap_point(Vec{{mid, 0}})), 0.5 * (f[static_cast<std::size_t>(i)] + f[static_cast<std::size_t>(j)]), 1e-14);
  }
}

TEST(CentralGradient, SineIsSecondOrder) {
  TorusGrid g(1, 64, 1, 1.0);
  std::vector<double> f;
  for (int i = 0; i < 64; ++i) f.push_back(std::sin(2 * pi * g.center(i)[0]));
  for (int i = 0; i < 64; ++i) {
    const double exact = 2 * pi * std::cos(2 * pi * g.center(i)[0]);
    // sinc correction is O(dx^2)
    EXPECT_NEAR(central_gradient(g, f, i)[0], exact, 2 * pi * std::pow(2 * pi * g.dx(), 2) / 6 + 1e-12);
  }
  std::vector<double> c(64, 1.0);
  EXPECT_EQ(central_gradient(g, c, 5)[0], 0.0);
}

TEST(CentralGradient, SawtoothSlope) {
  TorusGrid g(1, 10, 1, 1.0);
  std::vector<double> f;
  for (int i = 0; i < 10; ++i) f.push_back(0.3 * i);
  EXPECT_NEAR(central_gradient(g, f, 4)[0], 0.3 / g.dx(), 1e-12);
  const OneSidedGradient os = one_sided_gradient(g, f, 0);
  EXPECT_NEAR(os.forward[0], 0.3 / g.dx(), 1e-12);
  EXPECT_NEAR(os.backward[0], -2.7 / g.dx(), 1e-12);
}

TEST(Stencil, RadiusSelectsOffsets) {
  TorusGrid g(1, 10, 10, 1.0);
  EXPECT_EQ(Stencil(g, 0.1).offsets().size(), 3u);
  EXPECT_TRUE(Stencil(g, 0.05).empty());
  EXPECT_EQ(Stencil(g, 0.5).offsets().size(), 10u);
  TorusGrid g2(2, 6, 1, 1.0);
  // dx = 1/6; radius 1.5 dx keeps the 3x3 block
  EXPECT_EQ(Stencil(g2, 1.5 / 6).offsets().size(), 9u);
}

}  // namespace
}  // namespace mfgt
