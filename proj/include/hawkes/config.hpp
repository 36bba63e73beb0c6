#pragma once

// Flat key=value run configuration: file parsing, override application, and
// validation with messages that name the offending key.

#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "hawkes/csv.hpp"
#include "hawkes/errors.hpp"
#include "hawkes/graph.hpp"
#include "hawkes/version.hpp"

namespace hawkes {

struct run_config {
  int n = 0;  // required
  int k = 0;  // 0 means "default to N"
  double p = -1.0;  // required
  double mu = 1.0;
  std::string kernel_type = "exp";
  double kernel_a = 2.0;
  double kernel_b = 1.0;
  graph_mode mode = graph_mode::independent;
  double horizon = 100.0;  // key T
  int q = 12;
  int replicas = 100;
  std::uint64_t seed = 1;
  int threads = 1;
  std::int64_t max_events = 10'000'000;
  int grid_points = 50;
  double gamma = 1.0;  // toy rate scale
  double m_t = 100.0;  // toy effective mass
  std::vector<double> deltas = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15};
  bool n_given = false;
  bool p_given = false;
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline double config_number(const std::string& key, const std::string& value) {
  const char* begin = value.c_str();
  char* end = nullptr;
  double x = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    throw config_error("invalid value for key " + key + ": '" + value + "'");
  return x;
}

inline std::int64_t config_integer(const std::string& key, const std::string& value) {
  double x = config_number(key, value);
  auto i = static_cast<std::int64_t>(x);
  if (static_cast<double>(i) != x)
    throw config_error("key " + key + " needs an integer, got '" + value + "'");
  return i;
}

inline void apply_assignment(run_config& cfg, const std::string& key, const std::string& value) {
  if (key == "N") {
    cfg.n = static_cast<int>(config_integer(key, value));
    cfg.n_given = true;
  } else if (key == "K") {
    cfg.k = static_cast<int>(config_integer(key, value));
  } else if (key == "p") {
    cfg.p = config_number(key, value);
    cfg.p_given = true;
  } else if (key == "mu") {
    cfg.mu = config_number(key, value);
  } else if (key == "kernel.type") {
    cfg.kernel_type = value;
  } else if (key == "kernel.a") {
    cfg.kernel_a = config_number(key, value);
  } else if (key == "kernel.b") {
    cfg.kernel_b = config_number(key, value);
  } else if (key == "mode") {
    if (value == "independent")
      cfg.mode = graph_mode::independent;
    else if (value == "symmetric")
      cfg.mode = graph_mode::symmetric;
    else
      throw config_error("key mode accepts 'independent' or 'symmetric', got '" + value + "'");
  } else if (key == "T") {
    cfg.horizon = config_number(key, value);
  } else if (key == "q") {
    cfg.q = static_cast<int>(config_integer(key, value));
  } else if (key == "replicas") {
    cfg.replicas = static_cast<int>(config_integer(key, value));
  } else if (key == "seed") {
    std::int64_t s = config_integer(key, value);
    if (s < 0) throw config_error("key seed must be nonnegative");
    cfg.seed = static_cast<std::uint64_t>(s);
  } else if (key == "threads") {
    cfg.threads = static_cast<int>(config_integer(key, value));
  } else if (key == "max_events") {
    cfg.max_events = config_integer(key, value);
  } else if (key == "grid_points") {
    cfg.grid_points = static_cast<int>(config_integer(key, value));
  } else if (key == "gamma") {
    cfg.gamma = config_number(key, value);
  } else if (key == "m_t") {
    cfg.m_t = config_number(key, value);
  } else if (key == "deltas") {
    std::vector<double> parsed;
    for (const auto& field : split_fields(value)) parsed.push_back(config_number(key, field));
    cfg.deltas = parsed;
  } else {
    throw config_error("unknown config key: " + key);
  }
}

inline void apply_line(run_config& cfg, const std::string& raw) {
  std::string line = raw;
  auto hash = line.find('#');
  if (hash != std::string::npos) line.resize(hash);
  line = trim(line);
  if (line.empty()) return;
  auto eq = line.find('=');
  if (eq == std::string::npos) throw config_error("config line is not key=value: '" + line + "'");
  apply_assignment(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
}

}  // namespace detail

inline void validate(const run_config& cfg) {
  if (!cfg.n_given) throw config_error("missing required config key: N");
  if (!cfg.p_given) throw config_error("missing required config key: p");
  if (cfg.n < 1) throw config_error("key N must be at least 1");
  if (cfg.k < 1 || cfg.k > cfg.n) throw config_error("key K must lie in [1, N]");
  if (!(cfg.p >= 0.0 && cfg.p <= 1.0)) throw config_error("key p must lie in [0, 1]");
  if (!(cfg.mu > 0.0)) throw config_error("key mu must be positive");
  if (cfg.kernel_type != "exp")
    throw config_error("key kernel.type supports only 'exp', got '" + cfg.kernel_type + "'");
  if (!(cfg.kernel_a > 0.0)) throw config_error("key kernel.a must be positive");
  if (!(cfg.kernel_b > 0.0)) throw config_error("key kernel.b must be positive");
  if (!(cfg.horizon > 0.0)) throw config_error("key T must be positive");
  if (cfg.q <= 3) throw config_error("key q must exceed 3");
  if (cfg.replicas < 1) throw config_error("key replicas must be at least 1");
  if (cfg.threads < 1) throw config_error("key threads must be at least 1");
  if (cfg.max_events < 1) throw config_error("key max_events must be at least 1");
  if (cfg.grid_points < 1) throw config_error("key grid_points must be at least 1");
  if (!(cfg.gamma > 0.0)) throw config_error("key gamma must be positive");
  if (!(cfg.m_t > 0.0)) throw config_error("key m_t must be positive");
  if (cfg.deltas.empty()) throw config_error("key deltas must list at least one width");
  for (double d : cfg.deltas)
    if (!(d > 0.0)) throw config_error("key deltas must list positive widths");
}

// File (optional), then --set overrides in order, then the --seed flag.
inline run_config parse_config(const std::optional<std::string>& path,
                               const std::vector<std::string>& overrides,
                               const std::optional<std::uint64_t>& seed_flag) {
  run_config cfg;
  if (path) {
    std::ifstream in(*path);
    if (!in) throw io_error("cannot open config file: " + *path);
    std::string line;
    while (std::getline(in, line)) detail::apply_line(cfg, line);
  }
  for (const auto& entry : overrides) {
    auto eq = entry.find('=');
    if (eq == std::string::npos)
      throw config_error("--set expects key=value, got '" + entry + "'");
    detail::apply_assignment(cfg, detail::trim(entry.substr(0, eq)),
                             detail::trim(entry.substr(eq + 1)));
  }
  if (seed_flag) cfg.seed = *seed_flag;
  if (cfg.k == 0) cfg.k = cfg.n;
  validate(cfg);
  return cfg;
}

// Deterministic run record: tool identity plus the full effective config.
inline std::vector<std::string> manifest_lines(const run_config& cfg, const std::string& command) {
  std::vector<std::string> lines;
  lines.push_back(std::string("tool=hawkes ") + version_string);
  lines.push_back("format=" + std::to_string(output_format_version));
  lines.push_back("command=" + command);
  lines.push_back("N=" + std::to_string(cfg.n));
  lines.push_back("K=" + std::to_string(cfg.k));
  lines.push_back("p=" + format_number(cfg.p));
  lines.push_back("mu=" + format_number(cfg.mu));
  lines.push_back("kernel.type=" + cfg.kernel_type);
  lines.push_back("kernel.a=" + format_number(cfg.kernel_a));
  lines.push_back("kernel.b=" + format_number(cfg.kernel_b));
  lines.push_back(std::string("mode=") +
                  (cfg.mode == graph_mode::independent ? "independent" : "symmetric"));
  lines.push_back("T=" + format_number(cfg.horizon));
  lines.push_back("q=" + std::to_string(cfg.q));
  lines.push_back("replicas=" + std::to_string(cfg.replicas));
  lines.push_back("seed=" + std::to_string(cfg.seed));
  lines.push_back("threads=" + std::to_string(cfg.threads));
  lines.push_back("max_events=" + std::to_string(cfg.max_events));
  lines.push_back("grid_points=" + std::to_string(cfg.grid_points));
  lines.push_back("gamma=" + format_number(cfg.gamma));
  lines.push_back("m_t=" + format_number(cfg.m_t));
  std::string ds = "deltas=";
  for (std::size_t j = 0; j < cfg.deltas.size(); ++j) {
    if (j) ds += ',';
    ds += format_number(cfg.deltas[j]);
  }
  lines.push_back(ds);
  return lines;
}

inline void write_manifest(const std::string& path, const run_config& cfg,
                           const std::string& command) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open for writing: " + path);
  for (const auto& line : manifest_lines(cfg, command)) out << line << "\n";
  out.flush();
  if (!out) throw io_error("write failed: " + path);
}

}  // namespace hawkes
