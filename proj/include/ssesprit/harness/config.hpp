#pragma once

// Experiment configuration: INI-style text with a few top-level keys and
// [geometry], [scenario], [smoothing], [sweep] sections.
//
//   trials = 500
//   seed = 1
//   variants = SE-SS UE-SS NC-SE-SS NC-UE-SS
//   [geometry]
//   M = 6 6 6
//   [scenario]
//   d = 2
//   mu = 0 0 0; 0.1 0.1 0.1
//   phases = 0 pi/2
//   ...
//   [smoothing]
//   L = opt
//   [sweep]
//   axis = snr
//   values = 0 10 20 30

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "ssesprit/closed_form.hpp"
#include "ssesprit/esprit.hpp"

namespace ssesprit::harness {

class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// A variant as named in configs and CSV rows: "NC-UE-SS" runs NC-UE with
// the configured smoothing, "NC-UE" runs it with L_r = 1 in every mode.
struct VariantSpec {
  Variant variant = Variant::se;
  bool smoothed = true;

  std::string label() const { return to_string(variant) + (smoothed ? "-SS" : ""); }
  bool operator==(const VariantSpec&) const = default;
};

inline std::optional<VariantSpec> parse_variant_spec(std::string_view s) {
  constexpr std::string_view suffix = "-SS";
  const bool smoothed = s.size() > suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
  if (smoothed) s.remove_suffix(suffix.size());
  const auto v = parse_variant(s);
  if (!v) return std::nullopt;
  return VariantSpec{*v, smoothed};
}

enum class SweepAxis { snr, snapshots, elements };

inline std::string to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::snr: return "snr";
    case SweepAxis::snapshots: return "N";
    case SweepAxis::elements: return "M";
  }
  return "?";
}

struct SweepSpec {
  SweepAxis axis = SweepAxis::snr;
  std::vector<double> values;
  double snr = 20.0;  // dB; used when the axis is not snr
};

// One fully resolved sweep point.
struct SweepPoint {
  double value = 0.0;
  ArrayGeometry geometry{{2}};
  SourceScenario scenario;
  SmoothingConfig smoothing;
  double snr = 0.0;
  double noise_variance = 0.0;

  SmoothingConfig smoothing_for(const VariantSpec& v) const {
    return v.smoothed ? smoothing : SmoothingConfig::none(geometry);
  }
};

struct ExperimentConfig {
  std::vector<int> elements;
  std::vector<double> delta;
  SourceScenario scenario;
  std::optional<std::vector<int>> subarrays;  // nullopt: L_opt per mode
  std::vector<VariantSpec> variants;
  SweepSpec sweep;
  int trials = 500;
  std::uint64_t seed = 1;
  std::string output;
  int threads = 1;
  double failure_budget = 0.01;  // max failures / trials per point and variant

  std::size_t points() const { return sweep.values.size(); }

  SweepPoint point(std::size_t k) const {
    require(k < sweep.values.size(), "ExperimentConfig: sweep index out of range");
    SweepPoint p;
    p.value = sweep.values[k];
    std::vector<int> m = elements;
    if (sweep.axis == SweepAxis::elements) m.assign(elements.size(), static_cast<int>(std::lround(p.value)));
    p.geometry = ArrayGeometry(m, delta);
    p.scenario = scenario;
    if (sweep.axis == SweepAxis::snapshots) p.scenario.snapshots = static_cast<int>(std::lround(p.value));
    p.snr = sweep.axis == SweepAxis::snr ? p.value : sweep.snr;
    p.noise_variance = scenario.power / std::pow(10.0, p.snr / 10.0);
    if (subarrays) {
      p.smoothing = SmoothingConfig(*subarrays);
    } else {
      std::vector<int> l;
      for (int v : m) l.push_back(closed_form::l_opt(v).value);
      p.smoothing = SmoothingConfig(l);
    }
    return p;
  }

  void validate() const {
    auto check = [](bool c, const std::string& msg) {
      if (!c) throw ConfigError(msg);
    };
    check(trials >= 1, "trials must be >= 1");
    check(threads >= 1, "threads must be >= 1");
    check(failure_budget >= 0.0 && failure_budget <= 1.0, "failure_budget must lie in [0, 1]");
    check(!sweep.values.empty(), "sweep.values must not be empty");
    check(!variants.empty(), "variants must not be empty");
    check(!elements.empty(), "geometry.M must not be empty");
    for (const auto& v : variants)
      check(!is_nc(v.variant) || scenario.nc, "variant " + v.label() + " needs scenario.nc = true");
    for (double v : sweep.values) {
      // snr = inf is a noiseless point.
      check(std::isfinite(v) || (sweep.axis == SweepAxis::snr && v > 0.0), "sweep.values must be finite");
      if (sweep.axis != SweepAxis::snr)
        check(v == std::round(v) && v >= 1.0, "sweep.values must be positive integers for axis " +
                                                  to_string(sweep.axis));
    }
    for (std::size_t k = 0; k < points(); ++k) {
      try {
        const SweepPoint p = point(k);
        p.scenario.validate(p.geometry);
        p.smoothing.validate(p.geometry);
      } catch (const ConfigError&) {
        throw;
      } catch (const Error& e) {
        std::ostringstream os;
        os << "sweep point " << sweep.values[k] << ": " << e.what();
        throw ConfigError(os.str());
      }
    }
  }

  // Stable text form of every field that affects the numbers (seed and
  // output path excluded); its hash goes into the CSV header.
  std::string canonical() const {
    std::ostringstream os;
    os << std::setprecision(17);
    auto list = [&os](const char* key, const auto& v) {
      os << key << '=';
      for (std::size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i];
      os << '\n';
    };
    list("M", elements);
    list("delta", delta);
    os << "d=" << scenario.sources << "\nmu=";
    for (Index i = 0; i < scenario.mu.rows(); ++i)
      for (Index r = 0; r < scenario.mu.cols(); ++r) os << scenario.mu(i, r) << (r + 1 < scenario.mu.cols() ? " " : ";");
    os << '\n';
    list("phases", scenario.phases);
    list("coherence_phases", scenario.coherence_phases);
    os << "correlation=" << scenario.correlation << "\npower=" << scenario.power << "\nN=" << scenario.snapshots
       << "\nnc=" << scenario.nc << '\n';
    if (subarrays)
      list("L", *subarrays);
    else
      os << "L=opt\n";
    os << "variants=";
    for (const auto& v : variants) os << v.label() << ' ';
    os << "\naxis=" << to_string(sweep.axis) << '\n';
    list("values", sweep.values);
    os << "snr=" << sweep.snr << "\ntrials=" << trials << "\nfailure_budget=" << failure_budget << '\n';
    return os.str();
  }

  std::uint64_t hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char c : canonical()) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    return h;
  }
};

namespace detail {

inline std::vector<std::string> tokens(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string t; is >> t;) out.push_back(t);
  return out;
}

inline double parse_number(const std::string& key, const std::string& t) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &pos);
  } catch (const std::exception&) {
    throw ConfigError(key + ": not a number: '" + t + "'");
  }
  if (pos != t.size()) throw ConfigError(key + ": not a number: '" + t + "'");
  return v;
}

// Numbers, optionally written as multiples of pi: "pi", "-pi/2", "3pi/4",
// "0.5pi".
inline double parse_angle(const std::string& key, const std::string& t) {
  const auto at = t.find("pi");
  if (at == std::string::npos) return parse_number(key, t);
  double coef = 1.0;
  const std::string head = t.substr(0, at);
  if (head == "-")
    coef = -1.0;
  else if (!head.empty() && head != "+")
    coef = parse_number(key, head.back() == '*' ? head.substr(0, head.size() - 1) : head);
  double div = 1.0;
  const std::string tail = t.substr(at + 2);
  if (!tail.empty()) {
    if (tail[0] != '/') throw ConfigError(key + ": bad angle '" + t + "'");
    div = parse_number(key, tail.substr(1));
    if (div == 0.0) throw ConfigError(key + ": division by zero in '" + t + "'");
  }
  return coef * std::numbers::pi / div;
}

inline std::vector<double> parse_angles(const std::string& key, const std::string& s) {
  std::vector<double> out;
  for (const auto& t : tokens(s)) out.push_back(parse_angle(key, t));
  return out;
}

inline std::vector<int> parse_ints(const std::string& key, const std::string& s) {
  std::vector<int> out;
  for (const auto& t : tokens(s)) {
    const double v = parse_number(key, t);
    if (v != std::round(v)) throw ConfigError(key + ": expected an integer, got '" + t + "'");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

// "a:b:step" expands to a, a+step, ..., b (inclusive within rounding).
inline std::vector<double> parse_grid(const std::string& key, const std::string& s) {
  std::vector<double> out;
  for (const auto& t : tokens(s)) {
    const auto c1 = t.find(':');
    if (c1 == std::string::npos) {
      out.push_back(parse_number(key, t));
      continue;
    }
    const auto c2 = t.find(':', c1 + 1);
    if (c2 == std::string::npos) throw ConfigError(key + ": range needs the form start:stop:step");
    const double a = parse_number(key, t.substr(0, c1));
    const double b = parse_number(key, t.substr(c1 + 1, c2 - c1 - 1));
    const double step = parse_number(key, t.substr(c2 + 1));
    if (!(step > 0.0) || b < a) throw ConfigError(key + ": range needs start <= stop and step > 0");
    const long n = std::lround(std::floor((b - a) / step + 1e-9));
    for (long i = 0; i <= n; ++i) out.push_back(a + static_cast<double>(i) * step);
  }
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError(key + ": expected true/false, got '" + s + "'");
}

inline const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"", {"trials", "seed", "output", "variants", "threads", "failure_budget"}},
      {"geometry", {"M", "delta"}},
      {"scenario", {"d", "mu", "phases", "correlation", "coherence_phases", "power", "N", "nc"}},
      {"smoothing", {"L"}},
      {"sweep", {"axis", "values", "snr"}},
  };
  return keys;
}

}  // namespace detail

inline ExperimentConfig parse_config(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }

  const auto& keys = detail::known_keys();
  for (const auto& [name, node] : tree) {
    if (node.empty()) {
      if (!keys.at("").count(name)) throw ConfigError("unknown key '" + name + "'");
      continue;
    }
    const auto sec = keys.find(name);
    if (sec == keys.end() || name.empty()) throw ConfigError("unknown section [" + name + "]");
    for (const auto& [key, _] : node)
      if (!sec->second.count(key)) throw ConfigError("unknown key '" + key + "' in [" + name + "]");
  }

  auto get = [&tree](const std::string& path) -> std::optional<std::string> {
    if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(path, '.'))) return *v;
    return std::nullopt;
  };
  auto need = [&get](const std::string& path) {
    auto v = get(path);
    if (!v || v->empty()) throw ConfigError("missing required key '" + path + "'");
    return *v;
  };

  ExperimentConfig cfg;
  using detail::parse_number;
  if (auto v = get("trials")) cfg.trials = static_cast<int>(parse_number("trials", *v));
  if (auto v = get("seed")) {
    const double s = parse_number("seed", *v);
    if (s < 0 || s != std::floor(s)) throw ConfigError("seed must be a non-negative integer");
    cfg.seed = std::stoull(*v);
  }
  if (auto v = get("output")) cfg.output = *v;
  if (auto v = get("threads")) cfg.threads = static_cast<int>(parse_number("threads", *v));
  if (auto v = get("failure_budget")) cfg.failure_budget = parse_number("failure_budget", *v);
  for (const auto& t : detail::tokens(need("variants"))) {
    const auto spec = parse_variant_spec(t);
    if (!spec) throw ConfigError("unknown variant '" + t + "'");
    cfg.variants.push_back(*spec);
  }

  cfg.elements = detail::parse_ints("geometry.M", need("geometry.M"));
  const int modes = static_cast<int>(cfg.elements.size());
  if (auto v = get("geometry.delta")) cfg.delta = detail::parse_angles("geometry.delta", *v);
  if (cfg.delta.empty()) cfg.delta.assign(cfg.elements.size(), 0.0);

  SourceScenario& sc = cfg.scenario;
  sc.sources = static_cast<int>(parse_number("scenario.d", need("scenario.d")));
  if (sc.sources < 1) throw ConfigError("scenario.d must be >= 1");
  {
    std::vector<std::vector<double>> rows;
    std::istringstream is(need("scenario.mu"));
    for (std::string row; std::getline(is, row, ';');)
      if (!detail::tokens(row).empty()) rows.push_back(detail::parse_angles("scenario.mu", row));
    if (static_cast<int>(rows.size()) != sc.sources)
      throw ConfigError("scenario.mu needs d rows separated by ';'");
    sc.mu.resize(sc.sources, modes);
    for (int i = 0; i < sc.sources; ++i) {
      if (static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != modes)
        throw ConfigError("scenario.mu rows need one frequency per mode");
      for (int r = 0; r < modes; ++r) sc.mu(i, r) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(r)];
    }
  }
  if (auto v = get("scenario.phases")) sc.phases = detail::parse_angles("scenario.phases", *v);
  if (auto v = get("scenario.coherence_phases"))
    sc.coherence_phases = detail::parse_angles("scenario.coherence_phases", *v);
  if (auto v = get("scenario.correlation")) sc.correlation = parse_number("scenario.correlation", *v);
  if (auto v = get("scenario.power")) sc.power = parse_number("scenario.power", *v);
  if (auto v = get("scenario.N")) sc.snapshots = static_cast<int>(parse_number("scenario.N", *v));
  if (auto v = get("scenario.nc")) sc.nc = detail::parse_bool("scenario.nc", *v);

  const std::string l = need("smoothing.L");
  if (l != "opt") cfg.subarrays = detail::parse_ints("smoothing.L", l);

  const std::string axis = need("sweep.axis");
  if (axis == "snr")
    cfg.sweep.axis = SweepAxis::snr;
  else if (axis == "N")
    cfg.sweep.axis = SweepAxis::snapshots;
  else if (axis == "M")
    cfg.sweep.axis = SweepAxis::elements;
  else
    throw ConfigError("sweep.axis must be snr, N or M");
  cfg.sweep.values = detail::parse_grid("sweep.values", need("sweep.values"));
  if (auto v = get("sweep.snr")) cfg.sweep.snr = parse_number("sweep.snr", *v);
  else if (cfg.sweep.axis != SweepAxis::snr) throw ConfigError("sweep.snr is required unless axis = snr");

  cfg.validate();
  return cfg;
}

inline ExperimentConfig parse_config(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

}  // namespace ssesprit::harness
