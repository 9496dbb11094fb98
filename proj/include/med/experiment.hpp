#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "med/dist.hpp"
#include "med/policy.hpp"
#include "med/presets.hpp"
#include "med/sim.hpp"

namespace med {

/// Validation failure carrying the JSON path of the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct ExperimentConfig {
  std::string name;
  double lo = 0.0;
  double hi = 1.0;
  std::vector<ArmModel> arms;
  std::vector<PolicyConfig> policies;
  std::uint64_t horizon = 0;
  std::size_t runs = 100;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> checkpoints;  ///< empty: log-spaced grid
  std::string output;
  std::size_t bound_atoms = BoundModel::kDefaultBetaAtoms;

  Environment environment() const { return Environment(arms, lo, hi); }
};

namespace detail {

using nlohmann::json;

inline void reject_unknown(const json& obj, const std::string& path,
                           std::initializer_list<const char*> allowed) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find_if(allowed.begin(), allowed.end(),
                     [&](const char* a) { return key == a; }) == allowed.end()) {
      throw ConfigError(path + "." + key, "unknown key");
    }
  }
}

inline const json& require(const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) throw ConfigError(path + "." + key, "missing required key");
  return obj.at(key);
}

inline double get_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  return v.get<double>();
}

inline std::uint64_t get_count(const json& v, const std::string& path) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) {
    if (v.get<std::int64_t>() < 0) throw ConfigError(path, "must be non-negative");
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  }
  if (v.is_number_float()) {
    const double x = v.get<double>();
    if (x >= 0.0 && x == std::floor(x) && x < 1.8e19) return static_cast<std::uint64_t>(x);
  }
  throw ConfigError(path, "expected a non-negative integer");
}

inline std::vector<double> get_number_list(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path, "expected a list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(get_number(v[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

inline ArmModel parse_arm(const json& a, const std::string& path, double lo, double hi) {
  if (!a.is_object()) throw ConfigError(path, "expected an object");
  const auto& kind_v = require(a, path, "kind");
  if (!kind_v.is_string()) throw ConfigError(path + ".kind", "expected a string");
  const auto kind = kind_v.get<std::string>();
  try {
    if (kind == "bernoulli") {
      reject_unknown(a, path, {"kind", "p"});
      const double p = get_number(require(a, path, "p"), path + ".p");
      if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(path + ".p", "must be in [0, 1]");
      return ArmModel::bernoulli(p, lo, hi);
    }
    if (kind == "beta") {
      reject_unknown(a, path, {"kind", "alpha", "beta"});
      const double al = get_number(require(a, path, "alpha"), path + ".alpha");
      const double be = get_number(require(a, path, "beta"), path + ".beta");
      if (!(al > 0.0)) throw ConfigError(path + ".alpha", "must be > 0");
      if (!(be > 0.0)) throw ConfigError(path + ".beta", "must be > 0");
      return ArmModel::beta(al, be, lo, hi);
    }
    if (kind == "discrete") {
      reject_unknown(a, path, {"kind", "points", "probs"});
      auto pts = get_number_list(require(a, path, "points"), path + ".points");
      auto pr = get_number_list(require(a, path, "probs"), path + ".probs");
      return ArmModel::discrete(std::move(pts), std::move(pr), lo, hi);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(path, e.what());
  }
  throw ConfigError(path + ".kind", "unknown arm kind '" + kind + "'");
}

inline PolicyConfig parse_policy(const json& p, const std::string& path) {
  if (!p.is_object()) throw ConfigError(path, "expected an object");
  const auto& kind_v = require(p, path, "policy");
  if (!kind_v.is_string()) throw ConfigError(path + ".policy", "expected a string");
  const auto kind = kind_v.get<std::string>();
  PolicyConfig c;
  if (kind == "med") {
    reject_unknown(p, path, {"policy", "name", "r", "d", "anchor"});
    c = PolicyConfig::med();
    if (p.contains("r")) c.r = static_cast<int>(get_count(p.at("r"), path + ".r"));
    if (p.contains("d")) c.d = get_number(p.at("d"), path + ".d");
    if (c.r < 1) throw ConfigError(path + ".r", "must be >= 1");
    if (!(c.d >= 0.0)) throw ConfigError(path + ".d", "must be >= 0");
    if (p.contains("anchor")) {
      const auto& an = p.at("anchor");
      if (an == "best") {
        c.anchor = PolicyConfig::Anchor::best_mean;
      } else if (an == "arm") {
        c.anchor = PolicyConfig::Anchor::arm_mean;
      } else {
        throw ConfigError(path + ".anchor", "expected \"best\" or \"arm\"");
      }
    }
  } else if (kind == "med-ideal") {
    reject_unknown(p, path, {"policy", "name", "r"});
    c = PolicyConfig::med_ideal();
    if (p.contains("r")) c.r = static_cast<int>(get_count(p.at("r"), path + ".r"));
    if (c.r < 1) throw ConfigError(path + ".r", "must be >= 1");
  } else if (kind == "ucb1") {
    reject_unknown(p, path, {"policy", "name"});
    c = PolicyConfig::ucb1();
  } else if (kind == "ucb-tuned") {
    reject_unknown(p, path, {"policy", "name"});
    c = PolicyConfig::ucb_tuned();
  } else if (kind == "ucb2") {
    reject_unknown(p, path, {"policy", "name", "alpha"});
    c = PolicyConfig::ucb2();
    if (p.contains("alpha")) c.alpha = get_number(p.at("alpha"), path + ".alpha");
    if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw ConfigError(path + ".alpha", "must be in (0, 1)");
  } else if (kind == "uniform-random") {
    reject_unknown(p, path, {"policy", "name"});
    c = PolicyConfig::uniform_random();
  } else {
    throw ConfigError(path + ".policy", "unknown policy '" + kind + "'");
  }
  if (p.contains("name")) {
    if (!p.at("name").is_string()) throw ConfigError(path + ".name", "expected a string");
    c.label = p.at("name").get<std::string>();
  }
  return c;
}

}  // namespace detail

inline ExperimentConfig parse_config(const nlohmann::json& j) {
  const std::string root = "$";
  if (!j.is_object()) throw ConfigError(root, "expected an object");
  detail::reject_unknown(j, root,
                         {"name", "description", "bounds", "arms", "policies", "horizon", "runs",
                          "seed", "checkpoints", "output", "bound_atoms"});
  ExperimentConfig c;
  if (j.contains("name")) c.name = j.at("name").get<std::string>();
  if (j.contains("bounds")) {
    const auto b = detail::get_number_list(j.at("bounds"), "$.bounds");
    if (b.size() != 2) throw ConfigError("$.bounds", "expected [a, b]");
    if (!(b[0] < b[1])) throw ConfigError("$.bounds", "requires a < b");
    c.lo = b[0];
    c.hi = b[1];
  }
  const auto& arms = detail::require(j, root, "arms");
  if (!arms.is_array()) throw ConfigError("$.arms", "expected a list");
  for (std::size_t i = 0; i < arms.size(); ++i) {
    c.arms.push_back(detail::parse_arm(arms[i], "$.arms[" + std::to_string(i) + "]", c.lo, c.hi));
  }
  if (c.arms.size() < 2) throw ConfigError("$.arms", "needs at least 2 arms");

  const auto& pols = detail::require(j, root, "policies");
  if (!pols.is_array()) throw ConfigError("$.policies", "expected a list");
  for (std::size_t i = 0; i < pols.size(); ++i) {
    c.policies.push_back(detail::parse_policy(pols[i], "$.policies[" + std::to_string(i) + "]"));
  }
  if (c.policies.empty()) throw ConfigError("$.policies", "needs at least one policy");
  for (std::size_t i = 0; i < c.policies.size(); ++i) {
    for (std::size_t k = 0; k < i; ++k) {
      if (label_of(c.policies[i]) == label_of(c.policies[k])) {
        throw ConfigError("$.policies[" + std::to_string(i) + "]",
                          "duplicate policy label '" + label_of(c.policies[i]) + "'");
      }
    }
  }

  c.horizon = detail::get_count(detail::require(j, root, "horizon"), "$.horizon");
  if (c.horizon < c.arms.size()) throw ConfigError("$.horizon", "must be >= number of arms");
  if (j.contains("runs")) c.runs = detail::get_count(j.at("runs"), "$.runs");
  if (c.runs < 1) throw ConfigError("$.runs", "must be >= 1");
  if (j.contains("seed")) c.seed = detail::get_count(j.at("seed"), "$.seed");
  if (j.contains("checkpoints")) {
    const auto& cp = j.at("checkpoints");
    if (cp.is_string()) {
      if (cp != "log") throw ConfigError("$.checkpoints", "expected \"log\" or a list of rounds");
    } else if (cp.is_array()) {
      for (std::size_t i = 0; i < cp.size(); ++i) {
        c.checkpoints.push_back(
            detail::get_count(cp[i], "$.checkpoints[" + std::to_string(i) + "]"));
      }
      for (std::size_t i = 0; i < c.checkpoints.size(); ++i) {
        if (c.checkpoints[i] < 1 || c.checkpoints[i] > c.horizon ||
            (i > 0 && c.checkpoints[i] <= c.checkpoints[i - 1])) {
          throw ConfigError("$.checkpoints[" + std::to_string(i) + "]",
                            "checkpoints must be strictly increasing within [1, horizon]");
        }
      }
      if (c.checkpoints.empty()) throw ConfigError("$.checkpoints", "empty list");
    } else {
      throw ConfigError("$.checkpoints", "expected \"log\" or a list of rounds");
    }
  }
  if (j.contains("output")) {
    if (!j.at("output").is_string()) throw ConfigError("$.output", "expected a string");
    c.output = j.at("output").get<std::string>();
  }
  if (j.contains("bound_atoms")) {
    c.bound_atoms = detail::get_count(j.at("bound_atoms"), "$.bound_atoms");
    if (c.bound_atoms < 1) throw ConfigError("$.bound_atoms", "must be >= 1");
  }
  return c;
}

inline ExperimentConfig parse_config_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("$", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(j);
}

/// Reads a JSON config file.  A name listed by `presets` that is not an
/// existing path loads the bundled preset instead.
inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    if (const auto* p = find_preset(path)) return parse_config_text(std::string(p->json));
    throw std::runtime_error("cannot open config '" + path + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

struct ResultRow {
  std::string policy;
  std::uint64_t n = 0;
  double regret_mean = 0.0;
  double regret_stderr = 0.0;
  double pct_best_mean = 0.0;  ///< fraction of pulls on an optimal arm, in [0, 1]
  double dmin_bound = 0.0;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::map<std::string, AggregateCurve> curves;  ///< by policy label
  BoundModel bound;
};

struct RunOptions {
  std::size_t workers = 1;
  bool shadow_check = false;
};

inline ExperimentResult run_experiment(const ExperimentConfig& config,
                                       const RunOptions& options = {}) {
  const auto env = config.environment();
  ExperimentResult result;
  result.bound = BoundModel::build(env, config.bound_atoms);

  EpisodeOptions ep;
  ep.checkpoints = config.checkpoints;
  ep.shadow_check = options.shadow_check;

  for (std::size_t p = 0; p < config.policies.size(); ++p) {
    const auto& pc = config.policies[p];
    const auto label = label_of(pc);
    std::vector<RunMetrics> runs;
    try {
      runs = run_replicated(env, pc, config.horizon, config.runs, config.seed, p, options.workers,
                            ep);
    } catch (const std::exception& e) {
      throw std::runtime_error("policy '" + label + "': " + e.what());
    }
    auto curve = aggregate(runs, result.bound);
    for (std::size_t i = 0; i < curve.checkpoints.size(); ++i) {
      result.rows.push_back({label, curve.checkpoints[i], curve.regret_mean[i],
                             curve.regret_stderr[i], curve.best_mean[i], curve.bound[i]});
    }
    result.curves.emplace(label, std::move(curve));
  }
  std::stable_sort(result.rows.begin(), result.rows.end(), [](const auto& a, const auto& b) {
    return a.policy != b.policy ? a.policy < b.policy : a.n < b.n;
  });
  return result;
}

inline constexpr const char* kCsvHeader =
    "policy,n,regret_mean,regret_stderr,pct_best_mean,dmin_bound";

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Quotes a field containing a comma, quote or line break (RFC 4180).
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

inline void write_csv(const std::vector<ResultRow>& rows, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << csv_field(r.policy) << ',' << r.n << ',' << format_double(r.regret_mean) << ','
        << format_double(r.regret_stderr) << ',' << format_double(r.pct_best_mean) << ','
        << format_double(r.dmin_bound) << '\n';
  }
}

inline std::string to_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream ss;
  write_csv(rows, ss);
  return ss.str();
}

inline void emit_csv(const std::vector<ResultRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_csv(rows, out);
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

/// Splits one CSV record, honoring quoted fields.
inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        fields.back() += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.emplace_back();
    } else {
      fields.back() += ch;
    }
  }
  if (quoted) throw std::runtime_error("parse_csv: unterminated quote: " + line);
  return fields;
}

/// Parses CSV produced by write_csv.
inline std::vector<ResultRow> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw std::runtime_error("parse_csv: missing or unexpected header");
  }
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 6) throw std::runtime_error("parse_csv: expected 6 fields: " + line);
    rows.push_back({f[0], std::stoull(f[1]), std::strtod(f[2].c_str(), nullptr),
                    std::strtod(f[3].c_str(), nullptr), std::strtod(f[4].c_str(), nullptr),
                    std::strtod(f[5].c_str(), nullptr)});
  }
  return rows;
}

inline std::string emit_summary(const ExperimentResult& result) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(4);
  s << "D_min bound coefficient: " << result.bound.coefficient << " * ln n";
  if (result.bound.approximated) s << " (beta arms approximated by quantile discretization)";
  s << '\n';
  for (const auto& [label, c] : result.curves) {
    const std::size_t last = c.checkpoints.size() - 1;
    const auto n = c.checkpoints[last];
    s << label << ": n=" << n << " regret=" << c.regret_mean[last] << " +/- "
      << c.regret_stderr[last];
    if (n > 1) s << " regret/ln(n)=" << c.regret_mean[last] / std::log(static_cast<double>(n));
    s << " best-arm=" << 100.0 * c.best_mean[last] << "%"
      << " bound=" << c.bound[last] << " runs=" << c.runs << '\n';
    if (c.shadow.pairs > 0) {
      s << "  shadow check: " << c.shadow.within << "/" << c.shadow.pairs << " ("
        << 100.0 * static_cast<double>(c.shadow.within) / static_cast<double>(c.shadow.pairs)
        << "%) cached D within " << MedPolicy::kShadowTolerance
        << " of exact, max error " << c.shadow.max_abs_error << '\n';
    }
  }
  return s.str();
}

}  // namespace med
