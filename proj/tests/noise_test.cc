#include "adsde/noise.hpp"

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

namespace adsde {
namespace {

// Known-answer vectors from the Random123 distribution (kat_vectors).
TEST(PhiloxTest, KnownAnswers) {
  using C = Philox4x32::Counter;
  using K = Philox4x32::Key;
  EXPECT_EQ(Philox4x32::encrypt(C{0, 0, 0, 0}, K{0, 0}),
            (C{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
  EXPECT_EQ(Philox4x32::encrypt(C{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                K{0xffffffffu, 0xffffffffu}),
            (C{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
  EXPECT_EQ(Philox4x32::encrypt(C{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                K{0xa4093822u, 0x299f31d0u}),
            (C{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(NoiseKindTest, NamesRoundTrip) {
  for (auto kind : {NoiseKind::StandardGaussian, NoiseKind::ScaledRademacher,
                    NoiseKind::BoundedUniform}) {
    EXPECT_EQ(noise_kind_from_string(to_string(kind)), kind);
  }
  EXPECT_THROW(noise_kind_from_string("cauchy"), std::invalid_argument);
}

TEST(NoiseKindTest, SubGaussianConstants) {
  EXPECT_EQ(kappa_of({NoiseKind::StandardGaussian, 2, 0}), 1.0);
  EXPECT_EQ(kappa_of({NoiseKind::ScaledRademacher, 2, 0}), 1.0);
  EXPECT_EQ(kappa_of({NoiseKind::BoundedUniform, 2, 0}), 3.0);
  EXPECT_EQ(tau_supremum({NoiseKind::StandardGaussian, 2, 0}), 0.5);
  EXPECT_TRUE(std::isinf(tau_supremum({NoiseKind::ScaledRademacher, 2, 0})));
}

TEST(NoiseStreamTest, SameSeedSameSequence) {
  NoiseStream a({NoiseKind::StandardGaussian, 3, 42});
  NoiseStream b({NoiseKind::StandardGaussian, 3, 42});
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.draw(), b.draw());
  EXPECT_EQ(a.counter(), 100u);
}

TEST(NoiseStreamTest, ResumesFromCounter) {
  NoiseStream a({NoiseKind::BoundedUniform, 5, 7}, 3);
  for (int i = 0; i < 17; ++i) a.draw();
  NoiseStream b({NoiseKind::BoundedUniform, 5, 7}, 3, a.counter());
  EXPECT_EQ(a.draw(), b.draw());
}

TEST(NoiseStreamTest, StreamsAndSeedsDiffer) {
  NoiseStream a({NoiseKind::StandardGaussian, 2, 1}, 0);
  NoiseStream b({NoiseKind::StandardGaussian, 2, 1}, 1);
  NoiseStream c({NoiseKind::StandardGaussian, 2, 2}, 0);
  const Vector ua = a.draw();
  EXPECT_NE(ua, b.draw());
  EXPECT_NE(ua, c.draw());
}

TEST(NoiseStreamTest, RademacherTakesTwoValues) {
  NoiseStream s({NoiseKind::ScaledRademacher, 7, 3});
  for (int i = 0; i < 200; ++i) {
    for (double u : s.draw()) EXPECT_TRUE(u == 1.0 || u == -1.0);
  }
}

TEST(NoiseStreamTest, UniformStaysInSupport) {
  NoiseStream s({NoiseKind::BoundedUniform, 3, 3});
  const double edge = std::sqrt(3.0);
  for (int i = 0; i < 2000; ++i) {
    for (double u : s.draw()) EXPECT_LE(std::abs(u), edge);
  }
}

class NoiseMomentTest : public ::testing::TestWithParam<NoiseKind> {};

// Centered, unit covariance, uncorrelated coordinates.
TEST_P(NoiseMomentTest, FirstTwoMoments) {
  constexpr int kDim = 3;
  constexpr int kDraws = 200000;
  NoiseStream s({GetParam(), kDim, 2024});
  Vector mean = Vector::Zero(kDim);
  Matrix second = Matrix::Zero(kDim, kDim);
  for (int i = 0; i < kDraws; ++i) {
    const Vector u = s.draw();
    mean += u;
    second += u * u.transpose();
  }
  mean /= kDraws;
  second /= kDraws;
  // 5 standard errors of a unit-variance mean / variance.
  const double tol = 5.0 * std::sqrt(2.0 / kDraws);
  for (int j = 0; j < kDim; ++j) {
    EXPECT_NEAR(mean[j], 0.0, tol);
    for (int k = 0; k < kDim; ++k) EXPECT_NEAR(second(j, k), j == k ? 1.0 : 0.0, 2.0 * tol);
  }
}

INSTANTIATE_TEST_SUITE_P(AllKinds, NoiseMomentTest,
                         ::testing::Values(NoiseKind::StandardGaussian,
                                           NoiseKind::ScaledRademacher,
                                           NoiseKind::BoundedUniform));

TEST(NoiseStreamTest, DrawIntoMatchesDraw) {
  NoiseStream a({NoiseKind::StandardGaussian, 5, 9});
  NoiseStream b({NoiseKind::StandardGaussian, 5, 9});
  std::vector<double> buf(5);
  b.draw_into(buf);
  const Vector u = a.draw();
  for (int j = 0; j < 5; ++j) EXPECT_EQ(u[j], buf[j]);
}

}  // namespace
}  // namespace adsde
