#pragma once

// Monte Carlo driver: per sweep point and trial, draw one dataset, run every
// requested variant, match estimates to the truth and accumulate squared
// errors next to the first-order prediction and the single-source CRB.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <ostream>
#include <thread>
#include <vector>

#include "ssesprit/closed_form.hpp"
#include "ssesprit/harness/config.hpp"
#include "ssesprit/perf_analysis.hpp"

namespace ssesprit::harness {

inline double wrap_angle(double x) { return std::remainder(x, 2.0 * std::numbers::pi); }

// Minimum total squared (wrapped) error over assignments of estimated to
// true sources. Exhaustive up to d = 6, greedy above.
inline double matched_squared_error(const RMatrix& est, const RMatrix& truth) {
  require(est.rows() == truth.rows() && est.cols() == truth.cols(), "matched_squared_error: shape mismatch");
  const Index d = truth.rows();
  RMatrix cost(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index k = 0; k < d; ++k) {
      double s = 0.0;
      for (Index r = 0; r < truth.cols(); ++r) s += std::pow(wrap_angle(est(i, r) - truth(k, r)), 2);
      cost(i, k) = s;
    }
  if (d <= 6) {
    std::vector<Index> perm(static_cast<std::size_t>(d));
    std::iota(perm.begin(), perm.end(), Index{0});
    double best = std::numeric_limits<double>::infinity();
    do {
      double s = 0.0;
      for (Index i = 0; i < d; ++i) s += cost(i, perm[static_cast<std::size_t>(i)]);
      best = std::min(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
  }
  std::vector<bool> used_e(static_cast<std::size_t>(d)), used_t(static_cast<std::size_t>(d));
  double total = 0.0;
  for (Index step = 0; step < d; ++step) {
    double best = std::numeric_limits<double>::infinity();
    Index bi = 0, bk = 0;
    for (Index i = 0; i < d; ++i)
      for (Index k = 0; k < d; ++k)
        if (!used_e[static_cast<std::size_t>(i)] && !used_t[static_cast<std::size_t>(k)] && cost(i, k) < best) {
          best = cost(i, k);
          bi = i;
          bk = k;
        }
    used_e[static_cast<std::size_t>(bi)] = used_t[static_cast<std::size_t>(bk)] = true;
    total += best;
  }
  return total;
}

struct VariantResult {
  std::string variant;
  double rmse_emp = 0.0;
  double rmse_ana = 0.0;
  double crb = 0.0;  // sqrt of the mean single-source CRB; nan for d > 1
  int trials = 0;
  int failures = 0;
};

struct PointResult {
  double sweep_value = 0.0;
  std::vector<VariantResult> variants;
};

struct RmseReport {
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  std::vector<PointResult> points;

  double worst_failure_rate() const {
    double w = 0.0;
    for (const auto& p : points)
      for (const auto& v : p.variants) w = std::max(w, static_cast<double>(v.failures) / v.trials);
    return w;
  }
};

namespace detail {

struct TrialOutcome {
  std::vector<double> squared_error;  // per variant; nan on failure
  std::vector<double> predicted;      // mean predicted MSE per variant; nan if undefined
  double crb = 0.0;
};

inline double mean_crb(const SweepPoint& p, const SnapshotData& data) {
  if (p.scenario.sources != 1) return std::numeric_limits<double>::quiet_NaN();
  const double rho = data.effective_snr();
  double s = 0.0;
  for (int r = 0; r < p.geometry.modes(); ++r) s += closed_form::crb_single(p.geometry.elements, r, rho);
  return s / p.geometry.modes();
}

inline TrialOutcome run_trial(const ExperimentConfig& cfg, const SweepPoint& p, std::size_t point_index, int trial,
                              bool empirical) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  Rng rng = make_stream(cfg.seed, {point_index, static_cast<std::uint64_t>(trial)});
  const SnapshotData data = synthesize(p.geometry, p.scenario, p.noise_variance, rng);
  const double params = static_cast<double>(p.scenario.sources * p.geometry.modes());

  TrialOutcome out;
  out.crb = mean_crb(p, data);
  for (const auto& spec : cfg.variants) {
    const SmoothingConfig sm = p.smoothing_for(spec);
    double err = nan;
    if (empirical) {
      try {
        const EspritEstimate est = estimate(data.x, p.geometry, sm, p.scenario.sources, spec.variant);
        err = matched_squared_error(est.mu, data.mu) / params;
        if (!std::isfinite(err)) err = nan;
      } catch (const NumericalError&) {
      }
    }
    out.squared_error.push_back(err);

    double pred = nan;
    try {
      pred = analytic_mse(p.geometry, sm, data, InputNoise::white(p.noise_variance), spec.variant).mean();
    } catch (const NumericalError&) {
    }
    out.predicted.push_back(pred);
  }
  return out;
}

template <class F>
void for_each_trial(int trials, int threads, F&& body) {
  if (threads <= 1) {
    for (int t = 0; t < trials; ++t) body(t);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < std::min(threads, trials); ++w)
    pool.emplace_back([&] {
      for (int t = next++; t < trials; t = next++) body(t);
    });
  for (auto& th : pool) th.join();
}

inline RmseReport run(const ExperimentConfig& cfg, bool empirical,
                      const std::function<void(const PointResult&)>& progress) {
  cfg.validate();
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  RmseReport report;
  report.seed = cfg.seed;
  report.config_hash = cfg.hash();
  for (std::size_t k = 0; k < cfg.points(); ++k) {
    const SweepPoint p = cfg.point(k);
    std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(cfg.trials));
    for_each_trial(cfg.trials, cfg.threads, [&](int t) {
      outcomes[static_cast<std::size_t>(t)] = run_trial(cfg, p, k, t, empirical);
    });

    // Reduction in trial order, independent of scheduling.
    PointResult pr;
    pr.sweep_value = p.value;
    double crb = 0.0;
    for (const auto& o : outcomes) crb += o.crb;
    crb /= cfg.trials;
    for (std::size_t v = 0; v < cfg.variants.size(); ++v) {
      VariantResult vr;
      vr.variant = cfg.variants[v].label();
      vr.trials = cfg.trials;
      double se = 0.0, pred = 0.0;
      int ok = 0;
      bool pred_ok = true;
      for (const auto& o : outcomes) {
        if (empirical) {
          if (std::isnan(o.squared_error[v])) {
            ++vr.failures;
          } else {
            se += o.squared_error[v];
            ++ok;
          }
        }
        if (std::isnan(o.predicted[v])) pred_ok = false;
        pred += o.predicted[v];
      }
      vr.rmse_emp = empirical && ok > 0 ? std::sqrt(se / ok) : nan;
      vr.rmse_ana = pred_ok ? std::sqrt(pred / cfg.trials) : nan;
      vr.crb = std::sqrt(crb);
      pr.variants.push_back(vr);
    }
    if (progress) progress(pr);
    report.points.push_back(std::move(pr));
  }
  return report;
}

}  // namespace detail

inline RmseReport run_experiment(const ExperimentConfig& cfg,
                                 const std::function<void(const PointResult&)>& progress = {}) {
  return detail::run(cfg, true, progress);
}

// Analytic columns only: the same symbol draws as run_experiment, no
// estimation. rmse_emp is nan and failures are 0.
inline RmseReport run_prediction(const ExperimentConfig& cfg,
                                 const std::function<void(const PointResult&)>& progress = {}) {
  return detail::run(cfg, false, progress);
}

inline std::string format_value(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline void write_csv(std::ostream& os, const RmseReport& report) {
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(report.config_hash));
  os << "# seed=" << report.seed << ", config-hash=" << hash << '\n';
  os << "sweep_value,variant,rmse_emp,rmse_ana,crb,trials,failures\n";
  for (const auto& p : report.points)
    for (const auto& v : p.variants)
      os << format_value(p.sweep_value) << ',' << v.variant << ',' << format_value(v.rmse_emp) << ','
         << format_value(v.rmse_ana) << ',' << format_value(v.crb) << ',' << v.trials << ',' << v.failures << '\n';
}

}  // namespace ssesprit::harness
