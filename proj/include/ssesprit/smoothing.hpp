#pragma once

// R-D spatial smoothing over maximally overlapping subarrays, its NC
// variant on augmented data, forward-backward averaging, and the 0/1
// matrices that map raw noise onto smoothed noise.

#include <vector>

#include "ssesprit/linalg.hpp"
#include "ssesprit/signal_model.hpp"

namespace ssesprit {

struct SmoothingConfig {
  std::vector<int> subarrays;  // L_r per mode

  SmoothingConfig() = default;
  explicit SmoothingConfig(std::vector<int> l) : subarrays(std::move(l)) {}

  static SmoothingConfig none(const ArrayGeometry& geom) {
    return SmoothingConfig(std::vector<int>(geom.elements.size(), 1));
  }

  void validate(const ArrayGeometry& geom) const {
    require(subarrays.size() == geom.elements.size(), "SmoothingConfig: need one L_r per mode");
    for (std::size_t r = 0; r < subarrays.size(); ++r)
      require(subarrays[r] >= 1 && subarrays[r] <= geom.elements[r] - 1,
              "SmoothingConfig: need 1 <= L_r <= M_r - 1");
  }

  // M_r^sub = M_r - L_r + 1 per mode.
  std::vector<int> subarray_lengths(const ArrayGeometry& geom) const {
    std::vector<int> out(subarrays.size());
    for (std::size_t r = 0; r < out.size(); ++r) out[r] = geom.elements[r] - subarrays[r] + 1;
    return out;
  }
  Index subarray_size(const ArrayGeometry& geom) const { return product(subarray_lengths(geom)); }
  Index count() const { return product(subarrays); }
};

inline SelectionMatrix rd_subarray_selection(const ArrayGeometry& geom, const SmoothingConfig& cfg,
                                             const MultiIndex& position) {
  return rd_subarray_selection(geom.elements, cfg.subarrays, position);
}

// All L selection matrices J_l in enumeration order (last mode fastest).
inline std::vector<SelectionMatrix> subarray_selections(const ArrayGeometry& geom,
                                                        const SmoothingConfig& cfg) {
  cfg.validate(geom);
  std::vector<SelectionMatrix> out;
  out.reserve(static_cast<std::size_t>(cfg.count()));
  MultiIndex l = MultiIndex::first(cfg.subarrays);
  do {
    out.push_back(rd_subarray_selection(geom, cfg, l));
  } while (l.next());
  return out;
}

// [J_{1..1} X, J_{1..2} X, ..., J_{L_1..L_R} X], size M_sub x N L.
inline CMatrix smooth(const CMatrix& x, const ArrayGeometry& geom, const SmoothingConfig& cfg) {
  require(x.rows() == geom.size(), "smooth: input must have M rows");
  const auto sel = subarray_selections(geom, cfg);
  const Index sub = cfg.subarray_size(geom);
  CMatrix out(sub, x.cols() * static_cast<Index>(sel.size()));
  for (std::size_t b = 0; b < sel.size(); ++b)
    out.middleCols(static_cast<Index>(b) * x.cols(), x.cols()) = sel[b].apply(x);
  return out;
}

// Same enumeration with (I_2 (x) J_l) applied to [X; Pi X*].
inline CMatrix smooth_nc(const AugmentedData& xnc, const ArrayGeometry& geom, const SmoothingConfig& cfg) {
  require(xnc.rows() == 2 * geom.size(), "smooth_nc: input must have 2M rows");
  const auto sel = subarray_selections(geom, cfg);
  const Index sub = cfg.subarray_size(geom);
  const Index n = xnc.cols();
  const Index m = geom.size();
  CMatrix out(2 * sub, n * static_cast<Index>(sel.size()));
  for (std::size_t b = 0; b < sel.size(); ++b) {
    auto block = out.middleCols(static_cast<Index>(b) * n, n);
    block.topRows(sub) = sel[b].apply(xnc.matrix().topRows(m));
    block.bottomRows(sub) = sel[b].apply(xnc.matrix().bottomRows(m));
  }
  return out;
}

// [Y, Pi_m Y* Pi_n].
inline CMatrix fba_extend(const CMatrix& y) {
  CMatrix out(y.rows(), 2 * y.cols());
  out.leftCols(y.cols()) = y;
  out.rightCols(y.cols()) = y.conjugate().reverse();
  return out;
}

// vec(smoothed noise) = StackingMatrix * vec(noise). Unlike a selection
// matrix a column may feed several rows (overlapping subarrays).
class StackingMatrix : public GatherMap {
 public:
  using GatherMap::GatherMap;
};

// Stacks (I_N (x) J_l) over l, or (I_N (x) I_2 (x) J_l) for NC data
// (maps vec of the 2M x N augmented noise).
inline StackingMatrix noise_stacking(const ArrayGeometry& geom, const SmoothingConfig& cfg, Index snapshots,
                                     bool nc = false) {
  const auto sel = subarray_selections(geom, cfg);
  const Index m = geom.size();
  const Index in_rows = nc ? 2 * m : m;
  std::vector<Index> src;
  src.reserve(static_cast<std::size_t>(sel.size() * snapshots * (nc ? 2 : 1) * cfg.subarray_size(geom)));
  for (const auto& j : sel)
    for (Index t = 0; t < snapshots; ++t) {
      for (Index k = 0; k < j.rows(); ++k) src.push_back(t * in_rows + j[k]);
      if (nc)
        for (Index k = 0; k < j.rows(); ++k) src.push_back(t * in_rows + m + j[k]);
    }
  return {in_rows * snapshots, std::move(src)};
}

// K~ with vec(N_nc) = K~ [vec(N); vec(N*)], built as
// K_{2M,N}^T blkdiag(K_{M,N}, K_{M,N} (I_N (x) Pi_M)).
inline SelectionMatrix nc_noise_basis(Index m, Index n) {
  const SelectionMatrix kmn = commutation_matrix(m, n);
  const SelectionMatrix flip = kmn * kron(SelectionMatrix::identity(n), exchange_matrix(m));
  std::vector<Index> blk(kmn.source());
  for (Index s : flip.source()) blk.push_back(s + m * n);
  const SelectionMatrix blockdiag(2 * m * n, std::move(blk));
  // K_{2M,N}^T = K_{N,2M}.
  return commutation_matrix(n, 2 * m) * blockdiag;
}

// J_{1..1} A: steering of the first (reference) subarray.
inline CMatrix smoothed_steering(const CMatrix& a, const ArrayGeometry& geom, const SmoothingConfig& cfg) {
  return rd_subarray_selection(geom, cfg, MultiIndex::first(cfg.subarrays)).apply(a);
}

}  // namespace ssesprit
