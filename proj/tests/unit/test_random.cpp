#include <gtest/gtest.h>

#include <cmath>

#include "support/generators.hpp"

namespace gaussot {
namespace {

TEST(NormalStream, DeterministicPerSeed) {
  NormalStream a(42), b(42), c(43);
  const Vector va = a.vector(1000), vb = b.vector(1000), vc = c.vector(1000);
  EXPECT_TRUE(va == vb);
  EXPECT_FALSE(va == vc);
}

TEST(NormalStream, FirstDrawsArePinned) {
  // Pins the generator so that a change in the scalar sampler is noticed.
  NormalStream s(0);
  std::mt19937_64 engine(0);
  double u, v, q;
  do {
    u = 2.0 * static_cast<double>(engine() >> 11) * 0x1.0p-53 - 1.0;
    v = 2.0 * static_cast<double>(engine() >> 11) * 0x1.0p-53 - 1.0;
    q = u * u + v * v;
  } while (q >= 1.0 || q == 0.0);
  const double f = std::sqrt(-2.0 * std::log(q) / q);
  EXPECT_EQ(s.next(), u * f);
  EXPECT_EQ(s.next(), v * f);
}

TEST(NormalStream, MomentsLookStandard) {
  NormalStream s(7);
  const Vector x = s.vector(200000);
  const double mean = x.mean();
  const double var = (x.array() - mean).square().mean();
  EXPECT_NEAR(mean, 0.0, 0.01);
  EXPECT_NEAR(var, 1.0, 0.01);
  const double kurt = (x.array() - mean).pow(4).mean() / (var * var);
  EXPECT_NEAR(kurt, 3.0, 0.05);
}

TEST(NormalStream, UniformRange) {
  NormalStream s(9);
  for (int k = 0; k < 10000; ++k) {
    const double u = s.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(RandomOrthogonal, IsOrthogonal) {
  NormalStream s(10);
  for (Index d = 1; d <= 8; ++d) {
    const Matrix q = random_orthogonal(d, s);
    EXPECT_LE((q.transpose() * q - Matrix::Identity(d, d)).cwiseAbs().maxCoeff(), 1e-13);
  }
}

}  // namespace
}  // namespace gaussot
