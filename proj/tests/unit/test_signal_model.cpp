#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace ssesprit;
using namespace ssesprit::test_util;

TEST(Steering, VectorExamples) {
  EXPECT_LT((steering_vector_mode(3, 0.0) - CVector::Ones(3)).norm(), 1e-15);
  CVector expect(2);
  expect << cdouble(0, -1), cdouble(0, 1);
  EXPECT_LT((steering_vector_mode(2, std::numbers::pi) - expect).norm(), 1e-15);

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int t = 0; t < 10; ++t) {
    const CVector a = steering_vector_mode(5, u(rng));
    EXPECT_LT((a.conjugate().reverse() - a).norm(), 1e-14);
  }
}

TEST(Steering, ShiftedReferenceFactorsOut) {
  const double mu = 0.7, delta = 1.5;
  const CVector a = steering_vector_mode(5, mu, delta);
  EXPECT_LT((a - std::polar(1.0, delta * mu) * steering_vector_mode(5, mu)).norm(), 1e-14);
}

TEST(Steering, MatrixExamples) {
  const ArrayGeometry ula({5});
  RMatrix mu(1, 1);
  mu << 0.4;
  EXPECT_LT((steering_matrix(ula, mu) - steering_vector_mode(5, 0.4)).norm(), 1e-15);
  const ArrayGeometry ura({2, 2});
  EXPECT_LT((steering_matrix(ura, RMatrix::Zero(1, 2)) - CVector::Ones(4)).norm(), 1e-15);
}

TEST(Steering, ShiftInvarianceAndCentroSymmetry) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 10; ++t) {
    const ArrayGeometry g({3 + t % 3, 4, 2 + t % 4});
    const RMatrix mu = random_frequencies(3, 3, rng);
    const CMatrix a = steering_matrix(g, mu);
    EXPECT_LT((a.conjugate().colwise().reverse() - a).norm(), 1e-12);
    for (int r = 0; r < 3; ++r) {
      const auto j1 = shift_selection(r, g.elements, Subarray::first);
      const auto j2 = shift_selection(r, g.elements, Subarray::second);
      CVector phi(3);
      for (int i = 0; i < 3; ++i) phi(i) = std::polar(1.0, mu(i, r));
      EXPECT_LT((j2.apply(a) - j1.apply(a) * phi.asDiagonal()).norm(), 1e-12);
    }
  }
}

TEST(Geometry, Validation) {
  EXPECT_THROW(ArrayGeometry({1}), InvalidArgument);
  EXPECT_THROW(ArrayGeometry({4}, {2.0}), InvalidArgument);
  EXPECT_NO_THROW(ArrayGeometry({4}, {1.5}));
  EXPECT_EQ(ArrayGeometry({6, 6, 6}).size(), 216);
}

TEST(Scenario, Validation) {
  const ArrayGeometry g({4, 4});
  RMatrix mu(2, 2);
  mu << 0.1, 0.2, 0.1, 0.2;
  EXPECT_THROW(scenario(mu, 3, false).validate(g), InvalidArgument);
  mu(1, 1) = 3.5;
  EXPECT_THROW(scenario(mu, 3, false).validate(g), InvalidArgument);
  mu(1, 1) = 0.5;
  EXPECT_NO_THROW(scenario(mu, 3, false).validate(g));
  auto sc = scenario(mu, 3, false);
  sc.correlation = 1.5;
  EXPECT_THROW(sc.validate(g), InvalidArgument);
}

TEST(Symbols, UncorrelatedNcSamplesDecorrelate) {
  RMatrix mu(2, 1);
  mu << 0.1, 0.9;
  auto sc = scenario(mu, 10000, true);
  Rng rng = make_stream(3);
  const CMatrix s = generate_symbols(sc, rng);
  const cdouble c = s.row(0).dot(s.row(1)) / std::sqrt(s.row(0).squaredNorm() * s.row(1).squaredNorm());
  EXPECT_LT(std::abs(c), 0.1);
}

TEST(Symbols, CoherentRowsHaveRankOne) {
  RMatrix mu(3, 1);
  mu << -0.5, 0.1, 0.8;
  for (bool nc : {false, true}) {
    auto sc = scenario(mu, 20, nc, 1.0);
    sc.coherence_phases = {0.0, 1.0, 2.0};
    Rng rng = make_stream(4);
    const CMatrix s = generate_symbols(sc, rng);
    Eigen::JacobiSVD<CMatrix> svd(s);
    EXPECT_LT(svd.singularValues()(1), 1e-12 * svd.singularValues()(0));
  }
}

TEST(Symbols, NcRowsAreRotatedReals) {
  RMatrix mu(3, 1);
  mu << -0.5, 0.1, 0.8;
  auto sc = scenario(mu, 50, true, 0.6);
  Rng rng = make_stream(5);
  const CMatrix s = generate_symbols(sc, rng);
  for (int i = 0; i < 3; ++i)
    EXPECT_LT((std::polar(1.0, -sc.phases[static_cast<std::size_t>(i)]) * s.row(i)).imag().cwiseAbs().maxCoeff(),
              1e-12);
}

TEST(Symbols, CorrelationRootRejectsIndefinite) {
  EXPECT_NO_THROW(correlation_root(3, 0.9));
  EXPECT_THROW(correlation_root(3, -0.9), NumericalError);
}

TEST(Noise, ZeroVarianceAndSecondOrderStatistics) {
  Rng rng = make_stream(6);
  EXPECT_EQ(generate_noise(3, 4, 0.0, rng), CMatrix::Zero(3, 4));

  const double s2 = 2.0;
  const int draws = 10000;
  CMatrix r = CMatrix::Zero(8, 8), c = CMatrix::Zero(8, 8);
  for (int k = 0; k < draws; ++k) {
    const CMatrix n = generate_noise(4, 2, s2, rng);
    const CVector v = Eigen::Map<const CVector>(n.data(), 8);
    r += v * v.adjoint();
    c += v * v.transpose();
  }
  r /= draws;
  c /= draws;
  const CMatrix ideal = s2 * CMatrix::Identity(8, 8);
  EXPECT_LT((r - ideal).norm() / ideal.norm(), 0.05);
  EXPECT_LT(c.norm() / ideal.norm(), 0.05);
}

TEST(Synthesize, StructureAndRank) {
  const ArrayGeometry g({4, 3});
  RMatrix mu(1, 2);
  mu << 0.3, -1.1;
  Rng rng = make_stream(7);
  const auto one = synthesize(g, scenario(mu, 6, true), 0.0, rng);
  Eigen::JacobiSVD<CMatrix> svd(one.x);
  EXPECT_LT(svd.singularValues()(1), 1e-12 * svd.singularValues()(0));

  RMatrix mu2(2, 2);
  mu2 << 0.3, -1.1, 1.0, 0.4;
  const auto two = synthesize(g, scenario(mu2, 2, true), 0.0, rng);
  ASSERT_TRUE(two.x_nc.has_value());
  EXPECT_EQ(two.x_nc->topRows(12), two.x);
  EXPECT_EQ(two.x_nc->bottomRows(12), two.x.conjugate().colwise().reverse());
  Eigen::JacobiSVD<CMatrix> svd2(*two.x_nc);
  EXPECT_GT(svd2.singularValues()(1), 1e-6 * svd2.singularValues()(0));

  const auto noisy = synthesize(g, scenario(mu2, 5, false), 0.1, rng);
  EXPECT_FALSE(noisy.x_nc.has_value());
  EXPECT_NEAR(noisy.empirical_power, noisy.symbols.squaredNorm() / 10.0, 1e-12);
  EXPECT_NEAR(noisy.effective_snr(), 5 * noisy.empirical_power / 0.1, 1e-9);
}

TEST(Synthesize, AugmentRequiresUnsmoothedRows) {
  const ArrayGeometry g({4});
  EXPECT_THROW(augment(CMatrix::Zero(3, 2), g), InvalidArgument);
}

TEST(Rng, StreamsAreReproducibleAndDistinct) {
  Rng a = make_stream(9, {1, 2}), b = make_stream(9, {1, 2}), c = make_stream(9, {2, 1});
  const auto x = a();
  EXPECT_EQ(x, b());
  EXPECT_NE(x, c());
}
