#pragma once

// R-D harmonic retrieval data model: steering matrices on a separable
// uniform grid, source symbols (arbitrary or strictly non-circular, with
// pairwise correlation up to full coherence), circular white noise, and the
// measurement matrices X and X_nc = [X; Pi_M X*].

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>

#include "ssesprit/linalg.hpp"

namespace ssesprit {

struct ArrayGeometry {
  std::vector<int> elements;  // M_r per mode
  std::vector<double> delta;  // phase-reference shift per mode; 0 = centroid

  explicit ArrayGeometry(std::vector<int> m, std::vector<double> shift = {})
      : elements(std::move(m)), delta(std::move(shift)) {
    if (delta.empty()) delta.assign(elements.size(), 0.0);
    validate();
  }

  void validate() const {
    require(!elements.empty(), "ArrayGeometry: at least one mode required");
    require(delta.size() == elements.size(), "ArrayGeometry: delta needs one entry per mode");
    for (std::size_t r = 0; r < elements.size(); ++r) {
      require(elements[r] >= 2, "ArrayGeometry: M_r must be >= 2");
      const double half = 0.5 * (elements[r] - 1);
      require(std::abs(delta[r]) <= half + 1e-12, "ArrayGeometry: delta out of range");
    }
  }

  int modes() const { return static_cast<int>(elements.size()); }
  Index size() const { return product(elements); }
  bool centered() const {
    return std::all_of(delta.begin(), delta.end(), [](double v) { return v == 0.0; });
  }
};

struct SourceScenario {
  int sources = 1;
  RMatrix mu;                     // sources x modes, spatial frequencies in (-pi, pi]
  std::vector<double> phases;     // NC rotation phases phi_i
  double correlation = 0.0;       // pairwise; 1 means coherent
  std::vector<double> coherence_phases;  // optional unit-modulus row scalings
  double power = 1.0;
  int snapshots = 1;
  bool nc = false;

  void validate(const ArrayGeometry& geom) const {
    require(sources >= 1, "SourceScenario: d must be >= 1");
    require(mu.rows() == sources && mu.cols() == geom.modes(),
            "SourceScenario: mu must be d x R");
    for (Index i = 0; i < mu.size(); ++i)
      require(mu.data()[i] > -std::numbers::pi - 1e-12 && mu.data()[i] <= std::numbers::pi + 1e-12,
              "SourceScenario: spatial frequencies must lie in (-pi, pi]");
    for (int i = 0; i < sources; ++i)
      for (int k = i + 1; k < sources; ++k)
        require((mu.row(i) - mu.row(k)).cwiseAbs().maxCoeff() > 0.0,
                "SourceScenario: frequency vectors must be distinct");
    require(phases.empty() || static_cast<int>(phases.size()) == sources,
            "SourceScenario: need one phase per source");
    require(coherence_phases.empty() || static_cast<int>(coherence_phases.size()) == sources,
            "SourceScenario: need one coherence phase per source");
    require(correlation >= 0.0 && correlation <= 1.0, "SourceScenario: correlation must be in [0, 1]");
    require(power > 0.0, "SourceScenario: power must be positive");
    require(snapshots >= 1, "SourceScenario: N must be >= 1");
  }

  bool coherent() const { return correlation >= 1.0; }

  // Total deterministic rotation of source i: phi_i (NC only) plus the
  // optional coherence phase.
  double rotation(int i) const {
    double v = 0.0;
    if (nc && !phases.empty()) v += phases[static_cast<std::size_t>(i)];
    if (!coherence_phases.empty()) v += coherence_phases[static_cast<std::size_t>(i)];
    return v;
  }
};

// Seeded generator; independent streams are derived from the master seed and
// a path of integers (sweep point, trial, ...).
using Rng = std::mt19937_64;

inline Rng make_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> path = {}) {
  std::vector<std::uint32_t> words;
  auto push = [&words](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(seed);
  for (auto p : path) push(p);
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

// Entries exp(j (m - (M_r + 1)/2 + delta) mu), m = 1..M_r.
inline CVector steering_vector_mode(int elements, double mu, double delta = 0.0) {
  require(elements >= 1, "steering_vector_mode: M_r must be >= 1");
  CVector a(elements);
  const double center = 0.5 * (elements + 1);
  for (int m = 1; m <= elements; ++m) a(m - 1) = std::polar(1.0, (m - center + delta) * mu);
  return a;
}

// A^(r) for all sources in mode r.
inline CMatrix steering_matrix_mode(const ArrayGeometry& geom, const RMatrix& mu, int mode) {
  CMatrix a(geom.elements[static_cast<std::size_t>(mode)], mu.rows());
  for (Index i = 0; i < mu.rows(); ++i)
    a.col(i) = steering_vector_mode(geom.elements[static_cast<std::size_t>(mode)], mu(i, mode),
                                    geom.delta[static_cast<std::size_t>(mode)]);
  return a;
}

// A = A^(1) <> A^(2) <> ... <> A^(R) (Khatri-Rao), columns a(mu_i).
inline CMatrix steering_matrix(const ArrayGeometry& geom, const RMatrix& mu) {
  require(mu.cols() == geom.modes(), "steering_matrix: mu must have R columns");
  CMatrix a = steering_matrix_mode(geom, mu, 0);
  for (int r = 1; r < geom.modes(); ++r) a = khatri_rao(a, steering_matrix_mode(geom, mu, r));
  return a;
}

inline CMatrix steering_matrix(const ArrayGeometry& geom, const SourceScenario& sc) {
  return steering_matrix(geom, sc.mu);
}

// Symmetric square root of the d x d matrix with unit diagonal and
// off-diagonal rho.
inline RMatrix correlation_root(int d, double rho) {
  RMatrix c = RMatrix::Constant(d, d, rho);
  c.diagonal().setOnes();
  Eigen::SelfAdjointEigenSolver<RMatrix> eig(c);
  const RVector& ev = eig.eigenvalues();
  if (ev.minCoeff() < -1e-12) throw NumericalError("correlation matrix is not positive semidefinite");
  return eig.eigenvectors() * ev.cwiseMax(0.0).cwiseSqrt().asDiagonal() * eig.eigenvectors().transpose();
}

inline CMatrix generate_symbols(const SourceScenario& sc, Rng& rng) {
  require(sc.snapshots >= 1, "generate_symbols: N must be >= 1");
  std::normal_distribution<double> normal(0.0, 1.0);
  const int d = sc.sources;
  const int n = sc.snapshots;
  CMatrix g(d, n);
  if (sc.nc) {
    for (int t = 0; t < n; ++t)
      for (int i = 0; i < d; ++i) g(i, t) = normal(rng);
  } else {
    const double s = std::sqrt(0.5);
    for (int t = 0; t < n; ++t)
      for (int i = 0; i < d; ++i) {
        const double re = normal(rng);
        const double im = normal(rng);
        g(i, t) = cdouble(s * re, s * im);
      }
  }
  CMatrix s = std::sqrt(sc.power) * correlation_root(d, sc.correlation).cast<cdouble>() * g;
  for (int i = 0; i < d; ++i) s.row(i) *= std::polar(1.0, sc.rotation(i));
  return s;
}

// i.i.d. CN(0, variance) entries.
inline CMatrix generate_noise(Index rows, Index cols, double variance, Rng& rng) {
  require(variance >= 0.0, "generate_noise: variance must be >= 0");
  if (variance == 0.0) return CMatrix::Zero(rows, cols);
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5 * variance));
  CMatrix n(rows, cols);
  for (Index t = 0; t < cols; ++t)
    for (Index m = 0; m < rows; ++m) {
      const double re = normal(rng);
      const double im = normal(rng);
      n(m, t) = cdouble(re, im);
    }
  return n;
}

// [X; Pi_M X*]. Only unsmoothed M-row data may be augmented.
class AugmentedData {
 public:
  AugmentedData(const CMatrix& x, const ArrayGeometry& geom) {
    require(x.rows() == geom.size(), "augment: input must have M rows (augment before smoothing)");
    const Index m = x.rows();
    data_.resize(2 * m, x.cols());
    data_.topRows(m) = x;
    data_.bottomRows(m) = x.conjugate().colwise().reverse();
  }
  const CMatrix& matrix() const { return data_; }
  Index rows() const { return data_.rows(); }
  Index cols() const { return data_.cols(); }

 private:
  CMatrix data_;
};

inline AugmentedData augment(const CMatrix& x, const ArrayGeometry& geom) { return {x, geom}; }

struct SnapshotData {
  CMatrix x;                     // M x N measurements
  std::optional<CMatrix> x_nc;   // 2M x N, set for NC scenarios
  CMatrix signal;                // noise-free A S
  CMatrix steering;              // A (M x d)
  CMatrix symbols;               // S (d x N)
  RMatrix mu;                    // ground truth, d x R
  RVector rotation;              // per-source symbol rotation (NC phase)
  double empirical_power = 0.0;  // ||S||_F^2 / (d N)
  double noise_variance = 0.0;
  bool nc = false;

  // N P_s / sigma^2 with the empirical source power.
  double effective_snr() const {
    return static_cast<double>(symbols.cols()) * empirical_power / noise_variance;
  }
};

inline SnapshotData assemble(const ArrayGeometry& geom, const SourceScenario& sc, CMatrix symbols,
                             const CMatrix& noise, double noise_variance) {
  SnapshotData out;
  out.steering = steering_matrix(geom, sc);
  out.signal = out.steering * symbols;
  out.x = out.signal + noise;
  out.symbols = std::move(symbols);
  out.mu = sc.mu;
  out.rotation.resize(sc.sources);
  for (int i = 0; i < sc.sources; ++i) out.rotation(i) = sc.rotation(i);
  out.empirical_power = out.symbols.squaredNorm() / static_cast<double>(out.symbols.size());
  out.noise_variance = noise_variance;
  out.nc = sc.nc;
  if (sc.nc) out.x_nc = augment(out.x, geom).matrix();
  return out;
}

inline SnapshotData synthesize(const ArrayGeometry& geom, const SourceScenario& sc, double noise_variance,
                               Rng& rng) {
  sc.validate(geom);
  CMatrix s = generate_symbols(sc, rng);
  CMatrix n = generate_noise(geom.size(), sc.snapshots, noise_variance, rng);
  return assemble(geom, sc, std::move(s), n, noise_variance);
}

}  // namespace ssesprit
