#pragma once

// Single-source design table: optimal subarray counts and the resulting MSE,
// gain, CRB and efficiency for a list of array geometries. MSE and CRB
// columns are normalized to unit effective SNR.

#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "ssesprit/closed_form.hpp"
#include "ssesprit/harness/config.hpp"

namespace ssesprit::harness {

// Comma-separated items, each either an explicit grid "6x6x4" or a range
// "3..60" of ULAs; "3..12:2" makes square R = 2 grids 3x3 .. 12x12.
inline std::vector<std::vector<int>> parse_geometry_spec(const std::string& spec) {
  std::vector<std::vector<int>> out;
  std::istringstream is(spec);
  for (std::string item; std::getline(is, item, ',');) {
    item = [](const std::string& s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    }(item);
    if (item.empty()) throw ConfigError("geometry spec: empty item");
    const auto dots = item.find("..");
    if (dots != std::string::npos) {
      int modes = 1;
      std::string hi = item.substr(dots + 2);
      if (const auto colon = hi.find(':'); colon != std::string::npos) {
        modes = detail::parse_ints("geometry", hi.substr(colon + 1)).at(0);
        hi = hi.substr(0, colon);
      }
      const auto lo_v = detail::parse_ints("geometry", item.substr(0, dots));
      const auto hi_v = detail::parse_ints("geometry", hi);
      if (lo_v.size() != 1 || hi_v.size() != 1 || modes < 1)
        throw ConfigError("geometry spec: bad range '" + item + "'");
      if (lo_v[0] < 2 || hi_v[0] < lo_v[0]) throw ConfigError("geometry spec: range needs 2 <= lo <= hi");
      for (int m = lo_v[0]; m <= hi_v[0]; ++m) out.emplace_back(static_cast<std::size_t>(modes), m);
      continue;
    }
    std::vector<int> g;
    std::istringstream parts(item);
    for (std::string t; std::getline(parts, t, 'x');) {
      const auto v = detail::parse_ints("geometry", t);
      if (v.size() != 1) throw ConfigError("geometry spec: bad grid '" + item + "'");
      g.push_back(v[0]);
    }
    for (int m : g)
      if (m < 2) throw ConfigError("geometry spec: M_r must be >= 2 in '" + item + "'");
    out.push_back(std::move(g));
  }
  if (out.empty()) throw ConfigError("geometry spec is empty");
  return out;
}

struct DesignRow {
  std::vector<int> elements;
  int mode = 0;
  int l_opt = 1;
  int l_opt_high = 1;
  bool no_gain = false;
  double mse_opt = 0.0;
  double mse_none = 0.0;
  double gain = 1.0;
  double crb = 0.0;
  double efficiency = 1.0;
  double efficiency_unsmoothed = 1.0;
};

// One row per geometry and mode; the other modes sit at their own L_opt.
inline std::vector<DesignRow> run_design_table(const std::vector<std::vector<int>>& geometries) {
  std::vector<DesignRow> rows;
  for (const auto& m : geometries) {
    const auto s = closed_form::summarize(m, 1.0);
    for (int r = 0; r < static_cast<int>(m.size()); ++r) {
      const auto k = static_cast<std::size_t>(r);
      DesignRow row;
      row.elements = m;
      row.mode = r;
      row.l_opt = s.subarrays[k];
      row.l_opt_high = closed_form::l_opt(m[k], closed_form::Branch::high).value;
      row.no_gain = s.no_gain[k];
      row.mse_opt = s.mse_opt[k];
      row.mse_none = s.mse_none[k];
      row.gain = s.gain[k];
      row.crb = s.crb[k];
      row.efficiency = s.efficiency[k];
      row.efficiency_unsmoothed = s.crb[k] / s.mse_none[k];
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

inline void write_design_csv(std::ostream& os, const std::vector<DesignRow>& rows) {
  os << "M,R,mode,M_r,L_opt,L_opt_high,no_gain,mse_opt,mse_none,gain,crb,efficiency,efficiency_unsmoothed\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.elements.size(); ++i) os << (i ? "x" : "") << row.elements[i];
    os << ',' << row.elements.size() << ',' << row.mode + 1 << ',' << row.elements[static_cast<std::size_t>(row.mode)]
       << ',' << row.l_opt << ',' << row.l_opt_high << ',' << (row.no_gain ? 1 : 0);
    for (double v : {row.mse_opt, row.mse_none, row.gain, row.crb, row.efficiency, row.efficiency_unsmoothed}) {
      char buf[32];
      std::snprintf(buf, sizeof buf, ",%.10g", v);
      os << buf;
    }
    os << '\n';
  }
}

}  // namespace ssesprit::harness
