#pragma once

// Single-source closed forms for spatially smoothed ESPRIT-type estimators on
// a uniform R-D grid with circular white noise: per-mode MSE, the optimal
// subarray count, the MSE at the optimum, the maximum smoothing gain, the
// deterministic CRB and the 1-D asymptotic efficiency. All MSE values scale
// as 1/rho with rho = N P_s / sigma^2 the effective SNR.

#include <algorithm>
#include <vector>

#include "ssesprit/types.hpp"

namespace ssesprit::closed_form {

inline Index total_elements(const std::vector<int>& m) {
  Index p = 1;
  for (int v : m) p *= v;
  return p;
}

// c_p: the contribution of an unaffected mode p, cubic in min{L_p, M_p - L_p}.
inline double c_factor(int m, int l) {
  require(m >= 2 && l >= 1 && l <= m - 1, "c_factor: need 1 <= L_p <= M_p - 1");
  const double k = std::min(l, m - l);
  const double msub = m - l + 1;
  return (k + 1.0) * (k * (2.0 * k - 3.0 * m - 2.0) + 6.0 * msub * l) / 3.0 - msub * l;
}

// prod_{p != r} c_p / (M_p^sub^2 L_p^2).
inline double other_mode_factor(const std::vector<int>& m, const std::vector<int>& l, int mode) {
  require(m.size() == l.size(), "other_mode_factor: M and L differ in length");
  double a = 1.0;
  for (std::size_t p = 0; p < m.size(); ++p) {
    if (static_cast<int>(p) == mode) continue;
    const double msub = m[p] - l[p] + 1;
    a *= c_factor(m[p], l[p]) / (msub * msub * l[p] * l[p]);
  }
  return a;
}

inline double mse_single(const std::vector<int>& m, const std::vector<int>& l, int mode, double rho) {
  require(mode >= 0 && static_cast<std::size_t>(mode) < m.size(), "mse_single: bad mode");
  require(rho > 0.0, "mse_single: rho must be positive");
  for (std::size_t p = 0; p < m.size(); ++p)
    require(l[p] >= 1 && l[p] <= m[p] - 1, "mse_single: need 1 <= L_r <= M_r - 1");
  const double mr = m[static_cast<std::size_t>(mode)];
  const double lr = l[static_cast<std::size_t>(mode)];
  const double a = other_mode_factor(m, l, mode);
  const double core = 2.0 * lr <= mr ? 1.0 / ((mr - lr) * (mr - lr) * lr) : 1.0 / ((mr - lr) * lr * lr);
  return core * a / rho;
}

enum class Branch { low, high };

struct OptimalSubarrays {
  int value = 1;
  bool no_gain = false;  // M_r < 3: smoothing cannot help
};

// M_r/3 rounded to the nearest integer (explicit cases for M_r mod 3 = 1, 2);
// the high branch is the mirror M_r - L_low = 2 M_r / 3 rounded.
inline OptimalSubarrays l_opt(int m, Branch branch = Branch::low) {
  require(m >= 2, "l_opt: M_r must be >= 2");
  if (m < 3) return {1, true};
  int low = 0;
  switch (m % 3) {
    case 0: low = m / 3; break;
    case 1: low = (m - 1) / 3; break;
    default: low = (m + 1) / 3; break;
  }
  return {branch == Branch::low ? low : m - low, false};
}

inline double mse_at_opt(const std::vector<int>& m, const std::vector<int>& other_l, int mode, double rho) {
  require(rho > 0.0, "mse_at_opt: rho must be positive");
  const double mr = m[static_cast<std::size_t>(mode)];
  const double a = other_mode_factor(m, other_l, mode);
  double denom = 0.0;
  switch (m[static_cast<std::size_t>(mode)] % 3) {
    case 0: denom = mr * mr * mr; break;
    case 1: denom = (mr + 0.5) * (mr + 0.5) * (mr - 1.0); break;
    default: denom = (mr - 0.5) * (mr - 0.5) * (mr + 1.0); break;
  }
  return 27.0 / 4.0 * a / denom / rho;
}

// MSE without smoothing: M_r / (rho M (M_r - 1)^2).
inline double mse_unsmoothed(const std::vector<int>& m, int mode, double rho) {
  const double mr = m[static_cast<std::size_t>(mode)];
  return mr / (static_cast<double>(total_elements(m)) * (mr - 1.0) * (mr - 1.0)) / rho;
}

// Maximum asymptotic smoothing gain in mode r; other modes use the
// subarray counts in other_l (entry r is ignored).
inline double smoothing_gain(const std::vector<int>& m, const std::vector<int>& other_l, int mode) {
  const double mr = m[static_cast<std::size_t>(mode)];
  const double big_m = static_cast<double>(total_elements(m));
  const double a = other_mode_factor(m, other_l, mode);
  switch (m[static_cast<std::size_t>(mode)] % 3) {
    case 0: return 4.0 / 27.0 * mr * mr * mr * mr / ((mr - 1.0) * (mr - 1.0)) / (big_m * a);
    case 1: return 4.0 / 27.0 * mr * (mr + 0.5) * (mr + 0.5) / (mr - 1.0) / (big_m * a);
    default:
      return 4.0 / 27.0 * mr * (mr - 0.5) * (mr - 0.5) * (mr + 1.0) / ((mr - 1.0) * (mr - 1.0) * big_m * a);
  }
}

// Deterministic single-source CRB, C^(r) = 6 / (rho M (M_r^2 - 1)).
inline double crb_single(const std::vector<int>& m, int mode, double rho) {
  require(rho > 0.0, "crb_single: rho must be positive");
  const double mr = m[static_cast<std::size_t>(mode)];
  return 6.0 / (rho * static_cast<double>(total_elements(m)) * (mr * mr - 1.0));
}

struct Efficiency {
  double smoothed = 0.0;    // eta(L_opt)
  double unsmoothed = 0.0;  // eta(L = 1) = 6(M - 1) / (M (M + 1))
};

// R = 1 asymptotic efficiency.
inline Efficiency efficiency(int m) {
  require(m >= 2, "efficiency: M must be >= 2");
  const double md = m;
  Efficiency e;
  e.unsmoothed = 6.0 * (md - 1.0) / (md * (md + 1.0));
  switch (m % 3) {
    case 0: e.smoothed = 8.0 / 9.0 * md * md / (md * md - 1.0); break;
    case 1: e.smoothed = 8.0 / 9.0 * (md + 0.5) * (md + 0.5) / (md * (md + 1.0)); break;
    default: e.smoothed = 8.0 / 9.0 * (md - 0.5) * (md - 0.5) / (md * (md - 1.0)); break;
  }
  return e;
}

// R > 1: CRB / MSE(L_opt) evaluated numerically (no closed form claimed).
inline double efficiency_numeric(const std::vector<int>& m, const std::vector<int>& other_l, int mode) {
  return crb_single(m, mode, 1.0) / mse_at_opt(m, other_l, mode, 1.0);
}

struct SingleSourceSummary {
  std::vector<int> elements;
  std::vector<int> subarrays;  // L_opt per mode (low branch)
  double rho = 1.0;
  std::vector<double> mse_opt, mse_none, gain, crb, efficiency;
  std::vector<bool> no_gain;
};

inline SingleSourceSummary summarize(const std::vector<int>& m, double rho) {
  SingleSourceSummary s;
  s.elements = m;
  s.rho = rho;
  for (int v : m) {
    const auto opt = l_opt(v);
    s.subarrays.push_back(opt.value);
    s.no_gain.push_back(opt.no_gain);
  }
  for (int r = 0; r < static_cast<int>(m.size()); ++r) {
    s.mse_opt.push_back(mse_single(m, s.subarrays, r, rho));
    s.mse_none.push_back(mse_unsmoothed(m, r, rho));
    s.gain.push_back(s.mse_none.back() / s.mse_opt.back());
    s.crb.push_back(crb_single(m, r, rho));
    s.efficiency.push_back(m.size() == 1 ? efficiency(m[0]).smoothed : s.crb.back() / s.mse_opt.back());
  }
  return s;
}

}  // namespace ssesprit::closed_form
