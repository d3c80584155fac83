#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace ssesprit;
using namespace ssesprit::test_util;

namespace {

Index rank(const CMatrix& m, double tol = 1e-9) {
  Eigen::JacobiSVD<CMatrix> svd(m);
  const RVector& s = svd.singularValues();
  Index k = 0;
  for (Index i = 0; i < s.size(); ++i)
    if (s(i) > tol * s(0)) ++k;
  return k;
}

CVector vec(const CMatrix& m) { return Eigen::Map<const CVector>(m.data(), m.size()); }

}  // namespace

TEST(SmoothingConfig, DerivedSizes) {
  const ArrayGeometry g({6, 5});
  const SmoothingConfig c({2, 3});
  EXPECT_EQ(c.subarray_lengths(g), (std::vector<int>{5, 3}));
  EXPECT_EQ(c.subarray_size(g), 15);
  EXPECT_EQ(c.count(), 6);
  EXPECT_THROW(SmoothingConfig({6, 1}).validate(g), InvalidArgument);
  EXPECT_THROW(SmoothingConfig({2}).validate(g), InvalidArgument);
}

TEST(Smooth, NoSmoothingIsIdentity) {
  std::mt19937_64 rng(1);
  const ArrayGeometry g({4, 3});
  const CMatrix x = random_complex(12, 5, rng);
  EXPECT_EQ(smooth(x, g, SmoothingConfig::none(g)), x);
  const auto xnc = augment(x, g);
  EXPECT_EQ(smooth_nc(xnc, g, SmoothingConfig::none(g)), xnc.matrix());
}

TEST(Smooth, RankProperties) {
  const ArrayGeometry g({8});
  RMatrix mu(1, 1);
  mu << 0.4;
  Rng rng = make_stream(2);
  const auto one = synthesize(g, scenario(mu, 3, true), 0.0, rng);
  EXPECT_EQ(rank(smooth(one.x, g, SmoothingConfig({4}))), 1);
  EXPECT_EQ(rank(smooth_nc(augment(one.x, g), g, SmoothingConfig({4}))), 1);

  RMatrix mu3(3, 1);
  mu3 << -0.9, 0.2, 1.3;
  auto sc = scenario(mu3, 1, false, 1.0);
  const auto coh = synthesize(g, sc, 0.0, rng);
  EXPECT_EQ(rank(coh.x), 1);
  EXPECT_EQ(rank(smooth(coh.x, g, SmoothingConfig({4}))), 3);
}

TEST(Smooth, NcBlocksInheritConjugateStructure) {
  std::mt19937_64 rng(3);
  const ArrayGeometry g({5, 4});
  const SmoothingConfig c({2, 3});
  const CMatrix x = random_complex(20, 2, rng);
  const CMatrix y = smooth_nc(augment(x, g), g, c);
  const Index sub = c.subarray_size(g);
  const Index n = 2;
  // Block l's bottom half equals Pi (block L-l+1's top half)*.
  MultiIndex l = MultiIndex::first(c.subarrays);
  do {
    const Index b = l.linear(), bm = l.mirrored().linear();
    const CMatrix bottom = y.block(sub, b * n, sub, n);
    const CMatrix top_mirror = y.block(0, bm * n, sub, n);
    EXPECT_LT((bottom - top_mirror.conjugate().colwise().reverse()).norm(), 1e-14);
  } while (l.next());
}

TEST(FbaExtend, Examples) {
  CMatrix y(1, 1);
  y << 2.0;
  CMatrix expect(1, 2);
  expect << 2.0, 2.0;
  EXPECT_EQ(fba_extend(y), expect);

  std::mt19937_64 rng(4);
  const CMatrix z = random_complex(5, 3, rng);
  const CMatrix once = fba_extend(z), twice = fba_extend(once);
  EXPECT_EQ(twice.cols(), 12);
  CMatrix both(5, 18);
  both << once, twice;
  EXPECT_EQ(rank(both), rank(once));

  const ArrayGeometry g({7});
  RMatrix mu(1, 1);
  mu << -0.6;
  Rng r2 = make_stream(5);
  const auto data = synthesize(g, scenario(mu, 4, false), 0.0, r2);
  EXPECT_EQ(rank(fba_extend(smooth(data.x, g, SmoothingConfig({3})))), 1);
}

TEST(NoiseStacking, MatchesSmoothing) {
  std::mt19937_64 rng(6);
  EXPECT_EQ(noise_stacking(ArrayGeometry({5}), SmoothingConfig({1}), 1).dense(), RMatrix::Identity(5, 5));

  for (auto [m, l, n] : {std::tuple{std::vector<int>{4}, std::vector<int>{2}, 2},
                         std::tuple{std::vector<int>{3, 4}, std::vector<int>{2, 2}, 3},
                         std::tuple{std::vector<int>{3, 3, 4}, std::vector<int>{2, 1, 3}, 2}}) {
    const ArrayGeometry g(m);
    const SmoothingConfig c(l);
    const CMatrix noise = random_complex(g.size(), n, rng);
    EXPECT_LT((noise_stacking(g, c, n).apply(vec(noise)) - vec(smooth(noise, g, c))).norm(), 1e-14);

    const auto xnc = augment(noise, g);
    EXPECT_LT((noise_stacking(g, c, n, true).apply(vec(xnc.matrix())) - vec(smooth_nc(xnc, g, c))).norm(), 1e-14);
  }
}

TEST(NcNoiseBasis, Identity) {
  std::mt19937_64 rng(7);
  const auto k11 = nc_noise_basis(1, 1);
  EXPECT_EQ(k11.dense(), RMatrix::Identity(2, 2));
  for (auto [m, n] : {std::pair{2, 2}, std::pair{5, 3}, std::pair{4, 1}}) {
    const CMatrix noise = random_complex(m, n, rng);
    CVector stacked(2 * m * n);
    stacked << vec(noise), vec(noise.conjugate());
    const ArrayGeometry g({m});
    const auto k = nc_noise_basis(m, n);
    EXPECT_LT((k.apply(stacked) - vec(augment(noise, g).matrix())).norm(), 1e-15);
    for (Index c : k.column_counts()) EXPECT_EQ(c, 1);
  }
}

TEST(GramIdentity, FbaDoublesNcSmoothedGram) {
  std::mt19937_64 rng(8);
  const ArrayGeometry g({5, 4});
  const SmoothingConfig c({2, 2});
  const CMatrix x = random_complex(20, 3, rng);
  const CMatrix y = smooth_nc(augment(x, g), g, c);
  const CMatrix yf = fba_extend(y);
  EXPECT_LT(relative_frobenius(yf * yf.adjoint(), 2.0 * y * y.adjoint()), 1e-12);
}

TEST(SmoothedSteering, Factorization) {
  std::mt19937_64 rng(9);
  const ArrayGeometry g({5, 6});
  const SmoothingConfig c({2, 3});
  const RMatrix mu = random_frequencies(3, 2, rng);
  const CMatrix a = steering_matrix(g, mu);
  const CMatrix ass = smoothed_steering(a, g, c);
  MultiIndex l = MultiIndex::first(c.subarrays);
  do {
    CVector phi(3);
    for (int i = 0; i < 3; ++i) phi(i) = std::polar(1.0, (l[0] - 1) * mu(i, 0) + (l[1] - 1) * mu(i, 1));
    EXPECT_LT((rd_subarray_selection(g, c, l).apply(a) - ass * phi.asDiagonal()).norm(), 1e-12);
  } while (l.next());
}
