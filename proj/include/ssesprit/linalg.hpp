#pragma once

// Structured matrices for R-D array processing: Kronecker and Khatri-Rao
// products, exchange and commutation matrices, subarray and shift-invariance
// selection matrices, and the multi-index that enumerates R-D subarrays.
//
// Conventions (frozen, every module depends on them):
//  * Array elements are linearized with mode 1 slowest and mode R fastest,
//    i.e. the ordering produced by a^(1) (x) a^(2) (x) ... (x) a^(R).
//  * Modes are addressed by 0-based index r = 0..R-1.
//  * Subarray positions l_r are 1-based, 1 <= l_r <= L_r, and multi-indices
//    are enumerated with the last mode fastest.

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "ssesprit/types.hpp"

namespace ssesprit {

inline Index product(const std::vector<int>& v) {
  return std::accumulate(v.begin(), v.end(), Index{1},
                         [](Index a, int b) { return a * b; });
}

class MultiIndex {
 public:
  MultiIndex(std::vector<int> entries, std::vector<int> bounds)
      : entries_(std::move(entries)), bounds_(std::move(bounds)) {
    require(entries_.size() == bounds_.size(),
            "MultiIndex: entries and bounds differ in length");
    for (std::size_t r = 0; r < entries_.size(); ++r) {
      require(bounds_[r] >= 1, "MultiIndex: bounds must be positive");
      require(entries_[r] >= 1 && entries_[r] <= bounds_[r],
              "MultiIndex: entry " + std::to_string(r) + " out of range");
    }
  }

  static MultiIndex first(const std::vector<int>& bounds) {
    return {std::vector<int>(bounds.size(), 1), bounds};
  }

  static MultiIndex from_linear(Index pos, const std::vector<int>& bounds) {
    require(pos >= 0 && pos < product(bounds), "MultiIndex: linear index out of range");
    std::vector<int> e(bounds.size());
    for (std::size_t k = bounds.size(); k-- > 0;) {
      e[k] = static_cast<int>(pos % bounds[k]) + 1;
      pos /= bounds[k];
    }
    return {std::move(e), bounds};
  }

  // Position in the enumeration order (0-based, last mode fastest).
  Index linear() const {
    Index pos = 0;
    for (std::size_t k = 0; k < entries_.size(); ++k) pos = pos * bounds_[k] + (entries_[k] - 1);
    return pos;
  }

  // Advances in enumeration order; returns false after the last index
  // (and wraps to the first one).
  bool next() {
    for (std::size_t k = entries_.size(); k-- > 0;) {
      if (entries_[k] < bounds_[k]) {
        ++entries_[k];
        return true;
      }
      entries_[k] = 1;
    }
    return false;
  }

  // L - l + 1, the index of the centro-symmetric partner subarray.
  MultiIndex mirrored() const {
    std::vector<int> e(entries_.size());
    for (std::size_t k = 0; k < e.size(); ++k) e[k] = bounds_[k] - entries_[k] + 1;
    return {std::move(e), bounds_};
  }

  std::size_t size() const { return entries_.size(); }
  int operator[](std::size_t r) const { return entries_[r]; }
  const std::vector<int>& entries() const { return entries_; }
  const std::vector<int>& bounds() const { return bounds_; }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

 private:
  std::vector<int> entries_;
  std::vector<int> bounds_;
};

// A 0/1 matrix with exactly one unit entry per row, stored as the column
// index of that entry. Applying it to a matrix gathers rows.
class GatherMap {
 public:
  GatherMap() = default;
  GatherMap(Index cols, std::vector<Index> source) : cols_(cols), source_(std::move(source)) {
    for (Index s : source_) require(s >= 0 && s < cols_, "GatherMap: source index out of range");
  }

  Index rows() const { return static_cast<Index>(source_.size()); }
  Index cols() const { return cols_; }
  const std::vector<Index>& source() const { return source_; }
  Index operator[](Index row) const { return source_[static_cast<std::size_t>(row)]; }

  template <class Derived>
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> apply(
      const Eigen::MatrixBase<Derived>& x) const {
    require(x.rows() == cols_, "GatherMap::apply: dimension mismatch");
    Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> out(rows(), x.cols());
    for (Index i = 0; i < rows(); ++i) out.row(i) = x.row(source_[static_cast<std::size_t>(i)]);
    return out;
  }

  // Adjoint action (scatter-add): returns G^T y.
  template <class Derived>
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> apply_transpose(
      const Eigen::MatrixBase<Derived>& y) const {
    require(y.rows() == rows(), "GatherMap::apply_transpose: dimension mismatch");
    Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> out =
        Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(cols_, y.cols());
    for (Index i = 0; i < rows(); ++i) out.row(source_[static_cast<std::size_t>(i)]) += y.row(i);
    return out;
  }

  RMatrix dense() const {
    RMatrix d = RMatrix::Zero(rows(), cols_);
    for (Index i = 0; i < rows(); ++i) d(i, source_[static_cast<std::size_t>(i)]) = 1.0;
    return d;
  }

  std::vector<Index> column_counts() const {
    std::vector<Index> c(static_cast<std::size_t>(cols_), 0);
    for (Index s : source_) ++c[static_cast<std::size_t>(s)];
    return c;
  }

  friend bool operator==(const GatherMap&, const GatherMap&) = default;

 protected:
  Index cols_ = 0;
  std::vector<Index> source_;
};

// outer * inner as gather maps.
inline std::vector<Index> compose_sources(const GatherMap& outer, const GatherMap& inner) {
  require(outer.cols() == inner.rows(), "compose: inner/outer dimension mismatch");
  std::vector<Index> src(static_cast<std::size_t>(outer.rows()));
  for (Index i = 0; i < outer.rows(); ++i) src[static_cast<std::size_t>(i)] = inner[outer[i]];
  return src;
}

inline std::vector<Index> kron_sources(const GatherMap& a, const GatherMap& b) {
  std::vector<Index> src;
  src.reserve(static_cast<std::size_t>(a.rows() * b.rows()));
  for (Index i = 0; i < a.rows(); ++i)
    for (Index k = 0; k < b.rows(); ++k) src.push_back(a[i] * b.cols() + b[k]);
  return src;
}

// Selection matrix: a gather map whose columns are used at most once
// (row sums 1, column sums 0 or 1).
class SelectionMatrix : public GatherMap {
 public:
  SelectionMatrix() = default;
  SelectionMatrix(Index cols, std::vector<Index> source) : GatherMap(cols, std::move(source)) {
    for (Index c : column_counts()) require(c <= 1, "SelectionMatrix: column selected twice");
  }

  static SelectionMatrix identity(Index n) {
    std::vector<Index> src(static_cast<std::size_t>(n));
    std::iota(src.begin(), src.end(), Index{0});
    return {n, std::move(src)};
  }

  friend SelectionMatrix operator*(const SelectionMatrix& outer, const SelectionMatrix& inner) {
    return {inner.cols(), compose_sources(outer, inner)};
  }
};

inline SelectionMatrix kron(const SelectionMatrix& a, const SelectionMatrix& b) {
  return {a.cols() * b.cols(), kron_sources(a, b)};
}

template <class DA, class DB>
Eigen::Matrix<typename DA::Scalar, Eigen::Dynamic, Eigen::Dynamic> kron(
    const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
  Eigen::Matrix<typename DA::Scalar, Eigen::Dynamic, Eigen::Dynamic> out(a.rows() * b.rows(),
                                                                          a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Column-wise Kronecker product.
template <class DA, class DB>
Eigen::Matrix<typename DA::Scalar, Eigen::Dynamic, Eigen::Dynamic> khatri_rao(
    const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
  require(a.cols() == b.cols(), "khatri_rao: column counts differ");
  Eigen::Matrix<typename DA::Scalar, Eigen::Dynamic, Eigen::Dynamic> out(a.rows() * b.rows(), a.cols());
  for (Index c = 0; c < a.cols(); ++c)
    for (Index i = 0; i < a.rows(); ++i) out.col(c).segment(i * b.rows(), b.rows()) = a(i, c) * b.col(c);
  return out;
}

// Pi_n: ones on the anti-diagonal.
inline SelectionMatrix exchange_matrix(Index n) {
  require(n >= 1, "exchange_matrix: n must be >= 1");
  std::vector<Index> src(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) src[static_cast<std::size_t>(i)] = n - 1 - i;
  return {n, std::move(src)};
}

// K_{m,n} with K_{m,n} vec(A) = vec(A^T) for A of size m x n.
inline SelectionMatrix commutation_matrix(Index m, Index n) {
  require(m >= 1 && n >= 1, "commutation_matrix: sizes must be >= 1");
  std::vector<Index> src(static_cast<std::size_t>(m * n));
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) src[static_cast<std::size_t>(i * n + j)] = j * m + i;
  return {m * n, std::move(src)};
}

// J_{l}^{(M_r)} = [0_{(l-1)} I_{M_sub} 0_{(L-l)}], M_sub = M_r - L_r + 1.
inline SelectionMatrix subarray_selection(int elements, int subarrays, int position) {
  require(subarrays >= 1 && subarrays <= elements, "subarray_selection: need 1 <= L_r <= M_r");
  require(position >= 1 && position <= subarrays, "subarray_selection: l_r out of range");
  const Index sub = elements - subarrays + 1;
  std::vector<Index> src(static_cast<std::size_t>(sub));
  for (Index k = 0; k < sub; ++k) src[static_cast<std::size_t>(k)] = position - 1 + k;
  return {elements, std::move(src)};
}

// J_l = J_{l_1}^{(M_1)} (x) ... (x) J_{l_R}^{(M_R)}, of size M_sub x M.
inline SelectionMatrix rd_subarray_selection(const std::vector<int>& elements,
                                             const std::vector<int>& subarrays,
                                             const MultiIndex& position) {
  require(elements.size() == subarrays.size() && position.size() == elements.size(),
          "rd_subarray_selection: dimension count mismatch");
  require(position.bounds() == subarrays, "rd_subarray_selection: multi-index bounds differ from L");
  SelectionMatrix out = SelectionMatrix::identity(1);
  for (std::size_t r = 0; r < elements.size(); ++r)
    out = kron(out, subarray_selection(elements[r], subarrays[r], position[r]));
  return out;
}

enum class Subarray { first, second };

// Maximum-overlap shift-invariance selector for mode r on a grid with the
// given per-mode lengths: I_{prod_{l<r}} (x) J_k (x) I_{prod_{l>r}}.
// With nc set the result is I_2 (x) (.) acting on a stacked [x; Pi x*]
// layout.
inline SelectionMatrix shift_selection(int mode, const std::vector<int>& lengths, Subarray which,
                                       bool nc = false) {
  require(mode >= 0 && static_cast<std::size_t>(mode) < lengths.size(), "shift_selection: bad mode");
  const int m = lengths[static_cast<std::size_t>(mode)];
  require(m >= 2, "shift_selection: mode length must be >= 2");
  std::vector<Index> src(static_cast<std::size_t>(m - 1));
  const Index offset = which == Subarray::first ? 0 : 1;
  for (Index k = 0; k < m - 1; ++k) src[static_cast<std::size_t>(k)] = k + offset;
  const SelectionMatrix jk(m, std::move(src));

  Index before = 1, after = 1;
  for (int l = 0; l < mode; ++l) before *= lengths[static_cast<std::size_t>(l)];
  for (std::size_t l = static_cast<std::size_t>(mode) + 1; l < lengths.size(); ++l) after *= lengths[l];
  SelectionMatrix out = kron(kron(SelectionMatrix::identity(before), jk), SelectionMatrix::identity(after));
  if (nc) out = kron(SelectionMatrix::identity(2), out);
  return out;
}

// Moore-Penrose pseudo-inverse through an SVD with the usual relative
// threshold.
inline CMatrix pseudo_inverse(const CMatrix& a) {
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVector& s = svd.singularValues();
  const double tol = std::max(a.rows(), a.cols()) * (s.size() ? s(0) : 0.0) *
                     std::numeric_limits<double>::epsilon();
  RVector inv = s;
  for (Index i = 0; i < s.size(); ++i) inv(i) = s(i) > tol ? 1.0 / s(i) : 0.0;
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

}  // namespace ssesprit
