#pragma once

// Spatially smoothed R-D ESPRIT estimators:
//   SE-SS     standard ESPRIT on smoothed data
//   UE-SS     forward-backward averaged (Unitary-equivalent) ESPRIT
//   NC-SE-SS  standard ESPRIT on NC-augmented smoothed data
//   NC-UE-SS  forward-backward averaged NC ESPRIT
//
// The "UE" variants run FBA followed by the complex-valued pipeline rather
// than the real-valued Unitary ESPRIT transform; both have the same
// first-order (high effective SNR) behaviour. Function names carry `fba` to
// keep that visible.

#include <array>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Eigenvalues>

#include "ssesprit/smoothing.hpp"

namespace ssesprit {

enum class Variant { se, ue_fba, nc_se, nc_ue_fba };

inline constexpr std::array<Variant, 4> kAllVariants{Variant::se, Variant::ue_fba, Variant::nc_se,
                                                     Variant::nc_ue_fba};

inline bool is_nc(Variant v) { return v == Variant::nc_se || v == Variant::nc_ue_fba; }
inline bool uses_fba(Variant v) { return v == Variant::ue_fba || v == Variant::nc_ue_fba; }

inline std::string to_string(Variant v) {
  switch (v) {
    case Variant::se: return "SE";
    case Variant::ue_fba: return "UE";
    case Variant::nc_se: return "NC-SE";
    case Variant::nc_ue_fba: return "NC-UE";
  }
  return "?";
}

inline std::optional<Variant> parse_variant(std::string_view s) {
  for (Variant v : kAllVariants)
    if (s == to_string(v)) return v;
  return std::nullopt;
}

// Smoothing followed by the variant's preprocessing. Real-linear in x, so
// applying it to a noise matrix yields the processed noise.
inline CMatrix preprocess(const CMatrix& x, const ArrayGeometry& geom, const SmoothingConfig& cfg,
                          Variant v) {
  CMatrix y = is_nc(v) ? smooth_nc(augment(x, geom), geom, cfg) : smooth(x, geom, cfg);
  return uses_fba(v) ? fba_extend(y) : y;
}

struct SubspaceDecomposition {
  CMatrix signal;          // U_s, d dominant left singular vectors
  RVector singular_values; // sigma_1 >= ... >= sigma_d
  CMatrix row_space;       // V_s
  bool rank_deficient = false;

  Index dimension() const { return signal.cols(); }

  // P_perp = I - U_s U_s^H.
  CMatrix noise_projector() const {
    return CMatrix::Identity(signal.rows(), signal.rows()) - signal * signal.adjoint();
  }
};

inline SubspaceDecomposition signal_subspace(const CMatrix& y, int d) {
  require(d >= 1 && d <= std::min(y.rows(), y.cols()), "signal_subspace: d exceeds matrix dimensions");
  SubspaceDecomposition out;
  auto take = [&out, d](const auto& svd) {
    out.signal = svd.matrixU().leftCols(d);
    out.singular_values = svd.singularValues().head(d);
    out.row_space = svd.matrixV().leftCols(d);
  };
  take(Eigen::BDCSVD<CMatrix>(y, Eigen::ComputeThinU | Eigen::ComputeThinV));
  // Eigen 3.4.0 BDCSVD can return NaNs on exactly low-rank input.
  if (!out.singular_values.allFinite() || !out.signal.allFinite() || !out.row_space.allFinite())
    take(Eigen::JacobiSVD<CMatrix>(y, Eigen::ComputeThinU | Eigen::ComputeThinV));
  const double top = out.singular_values(0);
  out.rank_deficient = !(top > 0.0) || out.singular_values(d - 1) <= 1e-10 * top;
  return out;
}

// Gamma^(r) = (J~1 U_s)^+ J~2 U_s, with J~k the maximum-overlap selectors of
// mode r on a grid with the given per-mode lengths.
inline CMatrix solve_invariance_ls(const CMatrix& us, const std::vector<int>& lengths, int mode, bool nc) {
  const CMatrix a = shift_selection(mode, lengths, Subarray::first, nc).apply(us);
  const CMatrix b = shift_selection(mode, lengths, Subarray::second, nc).apply(us);
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVector& s = svd.singularValues();
  if (s.size() < us.cols() || !(s(0) > 0.0) || s(s.size() - 1) <= 1e-12 * s(0))
    throw RankDeficientInvariance(mode, "rank-deficient shift-invariance equations in mode " +
                                            std::to_string(mode));
  return svd.solve(b);
}

inline CMatrix solve_invariance_ls(const SubspaceDecomposition& dec, const ArrayGeometry& geom,
                                   const SmoothingConfig& cfg, int mode, bool nc) {
  return solve_invariance_ls(dec.signal, cfg.subarray_lengths(geom), mode, nc);
}

struct EspritEstimate {
  RMatrix mu;           // d x R
  CMatrix eigenvalues;  // d x R, lambda_i^(r)
  CMatrix eigenvectors; // Q
  CMatrix inverse;      // P = Q^-1
  double condition = 0.0;
  int attempts = 0;
  bool degenerate = false;      // near-coincident eigenvalues of the combination
  bool rank_deficient = false;  // d exceeded the numerical rank of the data
};

struct PairingOptions {
  double max_condition = 1e8;
  int max_attempts = 8;
  std::uint64_t fallback_seed = 0x5eedULL;
};

// Pairs eigenvalues across modes through the eigenvectors of a fixed-weight
// combination sum_r beta_r Gamma^(r), beta_r = 1/(r+1) for r = 1..R. When the
// eigenvector matrix is ill-conditioned, random weights are drawn from a
// fixed-seed stream.
inline EspritEstimate joint_pair_eigen(const std::vector<CMatrix>& gammas, const PairingOptions& opt = {}) {
  require(!gammas.empty(), "joint_pair_eigen: need at least one mode");
  const Index d = gammas.front().rows();
  for (const auto& g : gammas) require(g.rows() == d && g.cols() == d, "joint_pair_eigen: Gamma must be d x d");

  std::vector<double> weights(gammas.size());
  for (std::size_t r = 0; r < weights.size(); ++r) weights[r] = 1.0 / static_cast<double>(r + 2);
  std::mt19937_64 rng(opt.fallback_seed);
  std::uniform_real_distribution<double> unif(0.1, 1.0);

  for (int attempt = 1; attempt <= opt.max_attempts; ++attempt) {
    CMatrix comb = CMatrix::Zero(d, d);
    for (std::size_t r = 0; r < gammas.size(); ++r) comb += weights[r] * gammas[r];
    Eigen::ComplexEigenSolver<CMatrix> eig(comb);
    if (eig.info() == Eigen::Success) {
      const CMatrix& q = eig.eigenvectors();
      Eigen::JacobiSVD<CMatrix> qsvd(q);
      const RVector& s = qsvd.singularValues();
      const double cond = s(s.size() - 1) > 0.0 ? s(0) / s(s.size() - 1) : std::numeric_limits<double>::infinity();
      if (cond <= opt.max_condition) {
        EspritEstimate est;
        est.eigenvectors = q;
        est.inverse = q.inverse();
        est.condition = cond;
        est.attempts = attempt;
        est.eigenvalues.resize(d, static_cast<Index>(gammas.size()));
        est.mu.resize(d, static_cast<Index>(gammas.size()));
        for (std::size_t r = 0; r < gammas.size(); ++r)
          for (Index i = 0; i < d; ++i) {
            const cdouble lam = (est.inverse.row(i) * gammas[r] * q.col(i))(0, 0);
            est.eigenvalues(i, static_cast<Index>(r)) = lam;
            est.mu(i, static_cast<Index>(r)) = std::arg(lam);
          }
        const auto& ev = eig.eigenvalues();
        const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
        for (Index i = 0; i < d; ++i)
          for (Index k = i + 1; k < d; ++k)
            if (std::abs(ev(i) - ev(k)) < 1e-8 * scale) est.degenerate = true;
        return est;
      }
    }
    for (auto& w : weights) w = unif(rng);
  }
  throw NumericalError("joint_pair_eigen: no well-conditioned eigenvector matrix found");
}

inline EspritEstimate estimate(const CMatrix& x, const ArrayGeometry& geom, const SmoothingConfig& cfg, int d,
                               Variant v, const PairingOptions& opt = {}) {
  cfg.validate(geom);
  const CMatrix y = preprocess(x, geom, cfg, v);
  const SubspaceDecomposition dec = signal_subspace(y, d);
  const std::vector<int> lengths = cfg.subarray_lengths(geom);
  std::vector<CMatrix> gammas;
  for (int r = 0; r < geom.modes(); ++r) gammas.push_back(solve_invariance_ls(dec.signal, lengths, r, is_nc(v)));
  EspritEstimate est = joint_pair_eigen(gammas, opt);
  est.rank_deficient = dec.rank_deficient;
  return est;
}

}  // namespace ssesprit
