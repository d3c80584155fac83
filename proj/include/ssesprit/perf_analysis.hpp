#pragma once

// First-order (high effective SNR) error and MSE predictions for the four
// smoothed ESPRIT variants.
//
// Every preprocessing chain (smoothing, NC augmentation, FBA) maps the raw
// noise n = vec(N) onto the processed noise through a 0/1 gather from the
// stacked vector [n; n*] of length 2MN. The second-order statistics of the
// processed noise are therefore congruences of
//   E{[n;n*][n;n*]^H} = [R C; C* R*],   E{[n;n*][n;n*]^T} = [C R; R* C*].
// NoiseStats keeps that structured form. Quadratic forms are evaluated on
// the dense propagated matrices when the processed dimension is at most
// kDenseCrossover, and otherwise by scattering the sensitivity vector back
// onto [n; n*] so the processed covariance is never materialized.

#include <optional>
#include <vector>

#include "ssesprit/esprit.hpp"

namespace ssesprit {

inline constexpr Index kDenseCrossover = 2000;

// Second-order statistics of the raw noise vec(N) (length MN).
class InputNoise {
 public:
  static InputNoise white(double variance) {
    require(variance >= 0.0, "InputNoise: variance must be >= 0");
    InputNoise n;
    n.variance_ = variance;
    return n;
  }

  static InputNoise general(CMatrix covariance, CMatrix pseudo_covariance) {
    require(covariance.rows() == covariance.cols() && pseudo_covariance.rows() == covariance.rows() &&
                pseudo_covariance.cols() == covariance.cols(),
            "InputNoise: covariance and pseudo-covariance must be square and equal-sized");
    require((covariance - covariance.adjoint()).norm() <= 1e-10 * (1.0 + covariance.norm()),
            "InputNoise: covariance must be Hermitian");
    InputNoise n;
    n.cov_ = std::move(covariance);
    n.pcov_ = std::move(pseudo_covariance);
    return n;
  }

  bool is_white() const { return !cov_.has_value(); }
  double variance() const { return variance_; }

  // R_nn and C_nn materialized for a given length MN.
  CMatrix covariance(Index len) const {
    if (cov_) {
      require(cov_->rows() == len, "InputNoise: size mismatch");
      return *cov_;
    }
    return variance_ * CMatrix::Identity(len, len);
  }
  CMatrix pseudo_covariance(Index len) const {
    if (pcov_) {
      require(pcov_->rows() == len, "InputNoise: size mismatch");
      return *pcov_;
    }
    return CMatrix::Zero(len, len);
  }

  InputNoise scaled(double f) const {
    InputNoise n = *this;
    n.variance_ *= f;
    if (n.cov_) *n.cov_ *= f;
    if (n.pcov_) *n.pcov_ *= f;
    return n;
  }

 private:
  double variance_ = 0.0;
  std::optional<CMatrix> cov_;
  std::optional<CMatrix> pcov_;
};

enum class NoiseKind { plain, fba, nc, nc_fba };

inline NoiseKind noise_kind(Variant v) {
  switch (v) {
    case Variant::se: return NoiseKind::plain;
    case Variant::ue_fba: return NoiseKind::fba;
    case Variant::nc_se: return NoiseKind::nc;
    case Variant::nc_ue_fba: return NoiseKind::nc_fba;
  }
  return NoiseKind::plain;
}

// Gather from the augmented raw noise [n; n*] (length 2 * raw) onto the
// processed noise vector.
class NoiseMap : public GatherMap {
 public:
  NoiseMap() = default;
  NoiseMap(Index raw, std::vector<Index> source) : GatherMap(2 * raw, std::move(source)), raw_(raw) {}

  // Lifts a plain gather G on n to [n; n*] -> G n.
  static NoiseMap from_plain(const GatherMap& g) { return {g.cols(), g.source()}; }

  Index raw() const { return raw_; }

  // Conjugating the output swaps the halves of [n; n*].
  Index conjugate_source(Index i) const {
    const Index s = (*this)[i];
    return s < raw_ ? s + raw_ : s - raw_;
  }

 private:
  Index raw_ = 0;
};

// v = G [n; n*]  ->  [v; Pi v*], the FBA noise stacking.
inline NoiseMap fba_noise_map(const NoiseMap& g) {
  std::vector<Index> src(g.source());
  const Index len = g.rows();
  for (Index j = 0; j < len; ++j) src.push_back(g.conjugate_source(len - 1 - j));
  return {g.raw(), std::move(src)};
}

inline NoiseMap noise_map(const ArrayGeometry& geom, const SmoothingConfig& cfg, Index snapshots, NoiseKind kind) {
  const Index raw = geom.size() * snapshots;
  NoiseMap base;
  if (kind == NoiseKind::plain || kind == NoiseKind::fba) {
    base = NoiseMap::from_plain(noise_stacking(geom, cfg, snapshots, false));
  } else {
    const StackingMatrix mnc = noise_stacking(geom, cfg, snapshots, true);
    const SelectionMatrix kt = nc_noise_basis(geom.size(), snapshots);
    base = NoiseMap(raw, compose_sources(mnc, kt));
  }
  return (kind == NoiseKind::fba || kind == NoiseKind::nc_fba) ? fba_noise_map(base) : base;
}

// Covariance R_ss and pseudo-covariance C_ss of the processed noise.
class NoiseStats {
 public:
  NoiseStats(NoiseKind kind, NoiseMap map, InputNoise input)
      : kind_(kind), map_(std::move(map)), input_(std::move(input)) {}

  NoiseKind kind() const { return kind_; }
  const NoiseMap& map() const { return map_; }
  const InputNoise& input() const { return input_; }
  Index dimension() const { return map_.rows(); }

  // [R C; C* R*] and [C R; R* C*] of the stacked raw noise.
  CMatrix augmented_covariance() const {
    const Index n = map_.raw();
    const CMatrix r = input_.covariance(n), c = input_.pseudo_covariance(n);
    CMatrix out(2 * n, 2 * n);
    out << r, c, c.conjugate(), r.conjugate();
    return out;
  }
  CMatrix augmented_pseudo_covariance() const {
    const Index n = map_.raw();
    const CMatrix r = input_.covariance(n), c = input_.pseudo_covariance(n);
    CMatrix out(2 * n, 2 * n);
    out << c, r, r.conjugate(), c.conjugate();
    return out;
  }

  CMatrix covariance() const { return congruence(augmented_covariance()); }
  CMatrix pseudo_covariance() const { return congruence(augmented_pseudo_covariance()); }

  enum class Path { automatic, dense, block };

  // E{Im(z^T n_proc)^2} = 1/2 (z^T R z* - Re{z^T C z}).
  double quadratic_mse(const CVector& z, Path path = Path::automatic) const {
    require(z.size() == dimension(), "NoiseStats::quadratic_mse: size mismatch");
    if (path == Path::automatic) path = dimension() <= kDenseCrossover ? Path::dense : Path::block;
    if (path == Path::dense) {
      const CMatrix r = covariance(), c = pseudo_covariance();
      const cdouble t1 = z.transpose() * r * z.conjugate();
      const cdouble t2 = z.transpose() * c * z;
      return 0.5 * (t1.real() - t2.real());
    }
    const CVector y = map_.apply_transpose(z);
    const Index n = map_.raw();
    if (input_.is_white()) {
      const double s2 = input_.variance();
      const cdouble cross = y.head(n).transpose() * y.tail(n);
      return 0.5 * (s2 * y.squaredNorm() - 2.0 * s2 * cross.real());
    }
    const cdouble t1 = y.transpose() * augmented_covariance() * y.conjugate();
    const cdouble t2 = y.transpose() * augmented_pseudo_covariance() * y;
    return 0.5 * (t1.real() - t2.real());
  }

 private:
  CMatrix congruence(const CMatrix& aug) const {
    const Index k = map_.rows();
    CMatrix out(k, k);
    for (Index j = 0; j < k; ++j)
      for (Index i = 0; i < k; ++i) out(i, j) = aug(map_[i], map_[j]);
    return out;
  }

  NoiseKind kind_;
  NoiseMap map_;
  InputNoise input_;
};

inline NoiseStats propagate_noise_stats(const InputNoise& input, const ArrayGeometry& geom,
                                        const SmoothingConfig& cfg, Index snapshots, NoiseKind kind) {
  return {kind, noise_map(geom, cfg, snapshots, kind), input};
}

// Noise-free quantities needed by the first-order expansion of one variant:
// subspaces of the processed noise-free data and, per mode, the eigenvector
// matrices of Gamma^(r) identified with the true sources.
class FirstOrderModel {
 public:
  FirstOrderModel(const SnapshotData& data, const ArrayGeometry& geom, const SmoothingConfig& cfg, Variant v)
      : variant_(v), lengths_(cfg.subarray_lengths(geom)), modes_(geom.modes()) {
    cfg.validate(geom);
    require(!is_nc(v) || data.nc, "FirstOrderModel: NC variants need strictly non-circular symbols");
    const Index d = data.steering.cols();
    const CMatrix y0 = preprocess(data.signal, geom, cfg, v);
    dec_ = signal_subspace(y0, static_cast<int>(d));
    if (dec_.rank_deficient)
      throw NumericalError("FirstOrderModel: noise-free data has rank < d (smoothing too weak for coherent sources)");

    // U_s = A_eff K, hence Gamma^(r) = K^-1 Phi^(r) K: Q = K^-1, P = K.
    CMatrix a = data.steering;
    if (is_nc(v)) {
      const Index m = a.rows();
      CMatrix anc(2 * m, d);
      anc.topRows(m) = a;
      CMatrix lower = a.conjugate().colwise().reverse();
      for (Index i = 0; i < d; ++i) lower.col(i) *= std::polar(1.0, -2.0 * data.rotation(i));
      anc.bottomRows(m) = lower;
      a = std::move(anc);
    }
    const SelectionMatrix j1 = rd_subarray_selection(geom, cfg, MultiIndex::first(cfg.subarrays));
    CMatrix aeff;
    if (is_nc(v)) {
      const Index m = geom.size();
      aeff.resize(2 * j1.rows(), d);
      aeff.topRows(j1.rows()) = j1.apply(a.topRows(m));
      aeff.bottomRows(j1.rows()) = j1.apply(a.bottomRows(m));
    } else {
      aeff = j1.apply(a);
    }
    for (int r = 0; r < modes_; ++r) {
      const CMatrix j1u = shift_selection(r, lengths_, Subarray::first, is_nc(v)).apply(dec_.signal);
      Eigen::JacobiSVD<CMatrix> svd(j1u);
      const RVector& s = svd.singularValues();
      if (s.size() < d || !(s(0) > 0.0) || s(s.size() - 1) <= 1e-12 * s(0))
        throw RankDeficientInvariance(r, "FirstOrderModel: rank-deficient shift-invariance equations in mode " +
                                             std::to_string(r));
    }
    p_ = pseudo_inverse(aeff) * dec_.signal;
    q_ = p_.inverse();
    lambda_.resize(d, modes_);
    for (Index i = 0; i < d; ++i)
      for (int r = 0; r < modes_; ++r) lambda_(i, r) = std::polar(1.0, data.mu(i, r));
  }

  Variant variant() const { return variant_; }
  const SubspaceDecomposition& subspace() const { return dec_; }
  Index sources() const { return q_.cols(); }
  int modes() const { return modes_; }
  const CMatrix& eigenvectors() const { return q_; }
  const CMatrix& inverse() const { return p_; }
  cdouble eigenvalue(Index source, int mode) const { return lambda_(source, mode); }

  // (J~1 U_s)^+ (J~2 / lambda_i - J~1), a d x M_sub' matrix.
  CMatrix shift_operator(int mode, Index source) const {
    const bool nc = is_nc(variant_);
    const SelectionMatrix j1 = shift_selection(mode, lengths_, Subarray::first, nc);
    const SelectionMatrix j2 = shift_selection(mode, lengths_, Subarray::second, nc);
    const CMatrix pinv = pseudo_inverse(j1.apply(dec_.signal));
    const cdouble inv_lambda = 1.0 / lambda_(source, mode);
    CMatrix out = CMatrix::Zero(pinv.rows(), dec_.signal.rows());
    for (Index k = 0; k < j1.rows(); ++k) {
      out.col(j2[k]) += inv_lambda * pinv.col(k);
      out.col(j1[k]) -= pinv.col(k);
    }
    return out;
  }

  // r = q_i (x) ([pinv (J~2/lambda - J~1)]^T p_i).
  CVector r_vector(int mode, Index source) const {
    const CVector b = shift_operator(mode, source).transpose() * p_.row(source).transpose();
    return kron(q_.col(source), b);
  }

  // W = (Sigma^-1 V_s^T) (x) (U_n U_n^H), dense; test and small-size use only.
  CMatrix w_matrix() const {
    const CMatrix left = dec_.singular_values.cwiseInverse().asDiagonal() * dec_.row_space.transpose();
    return kron(left, dec_.noise_projector());
  }

  // z = W^T r = (V_s Sigma^-1 q_i) (x) (P_perp^T b): the first-order error
  // is Im{z^T vec(processed noise)}.
  CVector sensitivity(int mode, Index source) const {
    const CVector b = shift_operator(mode, source).transpose() * p_.row(source).transpose();
    const CVector pb = b - dec_.signal.conjugate() * (dec_.signal.transpose() * b);
    const CVector w = dec_.row_space * (dec_.singular_values.cwiseInverse().asDiagonal() * q_.col(source));
    return kron(w, pb);
  }

 private:
  Variant variant_;
  std::vector<int> lengths_;
  int modes_;
  SubspaceDecomposition dec_;
  CMatrix p_, q_;
  CMatrix lambda_;
};

// Delta mu_i^(r) = Im{p_i^T (J~1 U_s)^+ [J~2/lambda_i - J~1] Delta U_s q_i}
// with Delta U_s = U_n U_n^H N_proc V_s Sigma^-1, evaluated on the matrices.
inline double first_order_error(const CMatrix& noise, const FirstOrderModel& model, const ArrayGeometry& geom,
                                const SmoothingConfig& cfg, int mode, Index source) {
  const CMatrix nproc = preprocess(noise, geom, cfg, model.variant());
  const auto& dec = model.subspace();
  const CMatrix du = dec.noise_projector() * nproc * dec.row_space *
                     dec.singular_values.cwiseInverse().asDiagonal();
  const cdouble v = (model.inverse().row(source) * model.shift_operator(mode, source) * du *
                     model.eigenvectors().col(source))(0, 0);
  return v.imag();
}

struct MsePrediction {
  Variant variant = Variant::se;
  RMatrix mse;  // sources x modes

  double mean() const { return mse.mean(); }
};

inline MsePrediction analytic_mse(const FirstOrderModel& model, const NoiseStats& stats,
                                  NoiseStats::Path path = NoiseStats::Path::automatic) {
  require(stats.kind() == noise_kind(model.variant()), "analytic_mse: noise statistics kind does not match variant");
  MsePrediction out;
  out.variant = model.variant();
  out.mse.resize(model.sources(), model.modes());
  for (Index i = 0; i < model.sources(); ++i)
    for (int r = 0; r < model.modes(); ++r) out.mse(i, r) = stats.quadratic_mse(model.sensitivity(r, i), path);
  return out;
}

inline MsePrediction analytic_mse(const ArrayGeometry& geom, const SmoothingConfig& cfg, const SnapshotData& noiseless,
                                  const InputNoise& noise, Variant v) {
  const FirstOrderModel model(noiseless, geom, cfg, v);
  const NoiseStats stats = propagate_noise_stats(noise, geom, cfg, noiseless.signal.cols(), noise_kind(v));
  return analytic_mse(model, stats);
}

// White-noise predictions for a list of variants.
inline std::vector<MsePrediction> predict_all(const ArrayGeometry& geom, const SmoothingConfig& cfg,
                                              const SnapshotData& noiseless, double noise_variance,
                                              const std::vector<Variant>& variants) {
  std::vector<MsePrediction> out;
  out.reserve(variants.size());
  for (Variant v : variants)
    out.push_back(analytic_mse(geom, cfg, noiseless, InputNoise::white(noise_variance), v));
  return out;
}

}  // namespace ssesprit
