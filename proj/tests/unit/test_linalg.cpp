#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace ssesprit;
using ssesprit::test_util::random_complex;

TEST(MultiIndex, EnumerationIsLastModeFastest) {
  MultiIndex l = MultiIndex::first({2, 3});
  std::vector<std::vector<int>> seen;
  do {
    seen.push_back(l.entries());
  } while (l.next());
  const std::vector<std::vector<int>> expect{{1, 1}, {1, 2}, {1, 3}, {2, 1}, {2, 2}, {2, 3}};
  EXPECT_EQ(seen, expect);
  for (Index k = 0; k < 6; ++k) EXPECT_EQ(MultiIndex::from_linear(k, {2, 3}).linear(), k);
}

TEST(MultiIndex, RejectsOutOfRange) {
  EXPECT_THROW(MultiIndex({0, 1}, {2, 2}), InvalidArgument);
  EXPECT_THROW(MultiIndex({3}, {2}), InvalidArgument);
  EXPECT_THROW(MultiIndex::from_linear(4, {2, 2}), InvalidArgument);
}

TEST(ExchangeMatrix, SmallCases) {
  EXPECT_EQ(exchange_matrix(1).dense(), RMatrix::Identity(1, 1));
  RMatrix p3 = RMatrix::Zero(3, 3);
  p3(0, 2) = p3(1, 1) = p3(2, 0) = 1.0;
  EXPECT_EQ(exchange_matrix(3).dense(), p3);
  for (Index n = 2; n <= 8; ++n) EXPECT_EQ((exchange_matrix(n) * exchange_matrix(n)).dense(), RMatrix::Identity(n, n));
  EXPECT_THROW(exchange_matrix(0), InvalidArgument);
}

TEST(CommutationMatrix, VecTransposeIdentity) {
  std::mt19937_64 rng(1);
  EXPECT_EQ(commutation_matrix(1, 5).dense(), RMatrix::Identity(5, 5));
  for (auto [m, n] : {std::pair{2, 2}, std::pair{3, 4}, std::pair{5, 2}}) {
    const CMatrix a = random_complex(m, n, rng);
    const CMatrix at = a.transpose();
    const CVector va = Eigen::Map<const CVector>(a.data(), a.size());
    const CVector vat = Eigen::Map<const CVector>(at.data(), at.size());
    EXPECT_LT((commutation_matrix(m, n).apply(va) - vat).norm(), 1e-15);
  }
  EXPECT_EQ((commutation_matrix(3, 4) * commutation_matrix(4, 3)).dense(), RMatrix::Identity(12, 12));
}

TEST(SubarraySelection, Examples) {
  EXPECT_EQ(subarray_selection(4, 1, 1).dense(), RMatrix::Identity(4, 4));
  RMatrix j = RMatrix::Zero(3, 4);
  j.rightCols(3) = RMatrix::Identity(3, 3);
  EXPECT_EQ(subarray_selection(4, 2, 2).dense(), j);
  // M = 6, L = 3: three sliding windows of length 4.
  for (int l = 1; l <= 3; ++l) {
    const auto s = subarray_selection(6, 3, l);
    ASSERT_EQ(s.rows(), 4);
    for (Index k = 0; k < 4; ++k) EXPECT_EQ(s[k], l - 1 + k);
  }
  EXPECT_THROW(subarray_selection(4, 2, 3), InvalidArgument);
  EXPECT_THROW(subarray_selection(4, 2, 0), InvalidArgument);
}

TEST(RdSubarraySelection, Examples) {
  const MultiIndex l1 = MultiIndex::first({3});
  EXPECT_EQ(rd_subarray_selection({6}, {3}, l1), subarray_selection(6, 3, 1));
  EXPECT_EQ(rd_subarray_selection({3, 4}, {1, 1}, MultiIndex::first({1, 1})).dense(), RMatrix::Identity(12, 12));

  // M = (3, 3), L = (2, 2), l = (2, 1): grid rows {2, 3} x cols {1, 2}.
  const auto s = rd_subarray_selection({3, 3}, {2, 2}, MultiIndex({2, 1}, {2, 2}));
  std::vector<Index> expect;
  for (int m1 : {2, 3})
    for (int m2 : {1, 2}) expect.push_back((m1 - 1) * 3 + (m2 - 1));
  EXPECT_EQ(s.source(), expect);
  EXPECT_THROW(rd_subarray_selection({3, 3}, {2, 2}, MultiIndex({1, 1, 1}, {2, 2, 2})), InvalidArgument);
}

TEST(ShiftSelection, Examples) {
  RMatrix first = RMatrix::Zero(2, 3), second = RMatrix::Zero(2, 3);
  first.leftCols(2) = RMatrix::Identity(2, 2);
  second.rightCols(2) = RMatrix::Identity(2, 2);
  EXPECT_EQ(shift_selection(0, {3}, Subarray::first).dense(), first);
  EXPECT_EQ(shift_selection(0, {3}, Subarray::second).dense(), second);

  RMatrix nc = RMatrix::Zero(4, 6);
  nc.block(0, 0, 2, 3) = first;
  nc.block(2, 3, 2, 3) = first;
  EXPECT_EQ(shift_selection(0, {3}, Subarray::first, true).dense(), nc);
  EXPECT_THROW(shift_selection(0, {1}, Subarray::first), InvalidArgument);
}

TEST(ShiftSelection, SteeringInvariance) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int t = 0; t < 10; ++t) {
    const double mu = u(rng);
    const CVector a = steering_vector_mode(7, mu);
    const CVector j1 = shift_selection(0, {7}, Subarray::first).apply(a);
    const CVector j2 = shift_selection(0, {7}, Subarray::second).apply(a);
    EXPECT_LT((j2 - std::polar(1.0, mu) * j1).norm(), 1e-12);
  }
}

TEST(GatherMap, ApplyMatchesDenseProduct) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<Index> pick(0, 6);
  std::vector<Index> src(10);
  for (auto& s : src) s = pick(rng);
  const GatherMap g(7, src);
  const CMatrix x = random_complex(7, 3, rng);
  const CMatrix y = random_complex(10, 2, rng);
  EXPECT_LT((g.apply(x) - g.dense().cast<cdouble>() * x).norm(), 1e-14);
  EXPECT_LT((g.apply_transpose(y) - g.dense().transpose().cast<cdouble>() * y).norm(), 1e-14);
  EXPECT_THROW(SelectionMatrix(3, {0, 0}), InvalidArgument);
  EXPECT_THROW(GatherMap(3, {3}), InvalidArgument);
}

TEST(Kronecker, VecIdentity) {
  std::mt19937_64 rng(4);
  const CMatrix a = random_complex(3, 4, rng), x = random_complex(4, 2, rng), b = random_complex(2, 5, rng);
  const CMatrix axb = a * x * b;
  const CVector lhs = Eigen::Map<const CVector>(axb.data(), axb.size());
  const CVector vx = Eigen::Map<const CVector>(x.data(), x.size());
  EXPECT_LT((lhs - kron(b.transpose(), a) * vx).norm(), 1e-12 * lhs.norm());
}

TEST(Kronecker, SelectionKronMatchesDense) {
  const auto a = subarray_selection(4, 2, 2);
  const auto b = exchange_matrix(3);
  EXPECT_EQ(kron(a, b).dense(), kron(a.dense(), b.dense()));
}

TEST(MirrorSymmetry, ExchangeConjugatesSubarrays) {
  for (int m1 = 2; m1 <= 6; ++m1)
    for (int m2 = 2; m2 <= 4; ++m2)
      for (int l1 = 1; l1 < m1; ++l1)
        for (int l2 = 1; l2 < m2; ++l2) {
          const std::vector<int> m{m1, m2}, l{l1, l2};
          const Index msub = static_cast<Index>(m1 - l1 + 1) * (m2 - l2 + 1);
          MultiIndex pos = MultiIndex::first(l);
          do {
            const auto j = rd_subarray_selection(m, l, pos);
            const auto jm = rd_subarray_selection(m, l, pos.mirrored());
            EXPECT_EQ(exchange_matrix(msub) * j * exchange_matrix(m1 * m2), jm);
            EXPECT_EQ(exchange_matrix(msub) * j, jm * exchange_matrix(m1 * m2));
          } while (pos.next());
        }
}

TEST(PseudoInverse, FullColumnRank) {
  std::mt19937_64 rng(5);
  const CMatrix a = random_complex(6, 3, rng);
  EXPECT_LT((pseudo_inverse(a) * a - CMatrix::Identity(3, 3)).norm(), 1e-12);
}
