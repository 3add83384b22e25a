#pragma once

#include <CLI11.hpp>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "catena/error.hpp"
#include "catena/geometry.hpp"
#include "catena/model.hpp"

namespace catena::cli {

enum class Command {
  Catenoid,
  Eigencurve,
  Continue,
  Deflect,
  Thresholds,
  Simulate,
  Potential,
  Verify
};

inline const std::map<std::string, Command>& command_names() {
  static const std::map<std::string, Command> names{
      {"catenoid", Command::Catenoid},     {"eigencurve", Command::Eigencurve},
      {"continue", Command::Continue},     {"deflect", Command::Deflect},
      {"thresholds", Command::Thresholds}, {"simulate", Command::Simulate},
      {"potential", Command::Potential},   {"verify", Command::Verify},
  };
  return names;
}

inline std::string to_string(Command c) {
  for (const auto& [name, value] : command_names()) {
    if (value == c) return name;
  }
  return "?";
}

/// lambda = x means the single value x (continuation runs 0 -> x);
/// lambda = a:b:k means k uniform steps from a to b.
struct LambdaRange {
  double start = 0.0;
  double stop = 0.01;
  std::size_t steps = 10;
};

struct RunConfig {
  Command command = Command::Verify;
  double sigma = 2.0;
  LambdaRange lambda;
  Model model = Model::Sar;
  Branch branch = Branch::Outer;
  std::size_t grid_n = 401;
  std::size_t n_eta = 0;
  double newton_tol = 1e-10;
  double fbp_tol = 1e-8;
  double eig_tol = 1e-10;
  double c_lo = 0.5;
  double c_hi = 2.5;
  std::size_t samples = 41;
  std::size_t eigen_index = 0;
  double dt = 1e-3;
  double t_end = 5.0;
  double amplitude = 1e-3;
  std::string perturbation = "mode";  ///< mode | random
  std::uint64_t seed = 1;
  std::string output = "catena_out";
};

namespace detail {

struct KeyInfo {
  const char* key;
  const char* help;
};

inline const std::vector<KeyInfo>& config_keys() {
  static const std::vector<KeyInfo> keys{
      {"command",
       "catenoid | eigencurve | continue | deflect | thresholds | simulate | potential | verify"},
      {"sigma", "aspect ratio"},
      {"lambda", "voltage parameter: x or start:stop:steps"},
      {"model", "sar | fbp"},
      {"branch", "inner | outer"},
      {"grid_n", "nodes on [-1, 1], odd and >= 3"},
      {"n_eta", "potential nodes across the gap (0: automatic)"},
      {"newton_tol", "Newton residual tolerance (SAR)"},
      {"fbp_tol", "Newton residual tolerance (FBP)"},
      {"eig_tol", "shooting tolerance on |D|"},
      {"c_lo", "eigencurve: left end in c"},
      {"c_hi", "eigencurve: right end in c"},
      {"samples", "eigencurve: number of c samples"},
      {"eigen_index", "eigencurve: eigenvalue index n"},
      {"dt", "time step"},
      {"t_end", "final time"},
      {"amplitude", "perturbation amplitude"},
      {"perturbation", "mode | random"},
      {"seed", "seed for random perturbations"},
      {"output", "output directory"},
  };
  return keys;
}

[[noreturn]] inline void bad(const std::string& key, const std::string& why) {
  throw Error(ErrorKind::InvalidConfig, key + ": " + why);
}

inline double to_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    bad(key, "not a number: '" + v + "'");
  }
  if (pos != v.size() || !std::isfinite(x)) bad(key, "not a number: '" + v + "'");
  return x;
}

inline std::uint64_t to_unsigned(const std::string& key, const std::string& v) {
  if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos) {
    bad(key, "not a non-negative integer: '" + v + "'");
  }
  try {
    return std::stoull(v);
  } catch (const std::exception&) {
    bad(key, "out of range: '" + v + "'");
  }
}

inline double positive(const std::string& key, double x) {
  if (!(x > 0.0)) bad(key, "must be > 0");
  return x;
}

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline LambdaRange to_lambda(const std::string& v) {
  LambdaRange r;
  const auto c1 = v.find(':');
  if (c1 == std::string::npos) {
    r.start = 0.0;
    r.stop = to_double("lambda", v);
  } else {
    const auto c2 = v.find(':', c1 + 1);
    if (c2 == std::string::npos) bad("lambda", "range must be start:stop:steps");
    r.start = to_double("lambda", v.substr(0, c1));
    r.stop = to_double("lambda", v.substr(c1 + 1, c2 - c1 - 1));
    r.steps = static_cast<std::size_t>(to_unsigned("lambda", v.substr(c2 + 1)));
    if (r.steps == 0) bad("lambda", "steps must be >= 1");
  }
  if (r.start < 0.0 || r.stop < r.start) bad("lambda", "need 0 <= start <= stop");
  return r;
}

}  // namespace detail

/// Parses `key = value` lines; '#' starts a comment. Unknown keys are errors.
inline std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::InvalidConfig,
                  "line " + std::to_string(lineno) + ": expected key = value");
    }
    const auto key = detail::trim(line.substr(0, eq));
    const auto value = detail::trim(line.substr(eq + 1));
    bool known = false;
    for (const auto& k : detail::config_keys()) known = known || key == k.key;
    if (!known) throw Error(ErrorKind::InvalidConfig, key + ": unknown key");
    kv[key] = value;
  }
  return kv;
}

/// Builds a validated RunConfig from raw key/value strings; defaults fill the rest.
inline RunConfig make_config(const std::map<std::string, std::string>& kv) {
  using namespace detail;
  RunConfig c;
  auto get = [&](const char* key) -> std::optional<std::string> {
    if (auto it = kv.find(key); it != kv.end()) return it->second;
    return std::nullopt;
  };
  if (auto v = get("command")) {
    const auto it = command_names().find(*v);
    if (it == command_names().end()) bad("command", "unknown command '" + *v + "'");
    c.command = it->second;
  }
  if (auto v = get("sigma")) c.sigma = positive("sigma", to_double("sigma", *v));
  if (auto v = get("lambda")) c.lambda = to_lambda(*v);
  if (auto v = get("model")) {
    if (*v == "sar") {
      c.model = Model::Sar;
    } else if (*v == "fbp") {
      c.model = Model::Fbp;
    } else {
      bad("model", "expected sar or fbp");
    }
  }
  if (auto v = get("branch")) {
    if (*v == "inner") {
      c.branch = Branch::Inner;
    } else if (*v == "outer") {
      c.branch = Branch::Outer;
    } else {
      bad("branch", "expected inner or outer");
    }
  }
  if (auto v = get("grid_n")) {
    c.grid_n = static_cast<std::size_t>(to_unsigned("grid_n", *v));
    if (c.grid_n < 3 || c.grid_n % 2 == 0) bad("grid_n", "must be odd and >= 3");
  }
  if (auto v = get("n_eta")) {
    c.n_eta = static_cast<std::size_t>(to_unsigned("n_eta", *v));
    if (c.n_eta != 0 && c.n_eta < 4) bad("n_eta", "must be 0 or >= 4");
  }
  if (auto v = get("newton_tol"))
    c.newton_tol = positive("newton_tol", to_double("newton_tol", *v));
  if (auto v = get("fbp_tol")) c.fbp_tol = positive("fbp_tol", to_double("fbp_tol", *v));
  if (auto v = get("eig_tol")) c.eig_tol = positive("eig_tol", to_double("eig_tol", *v));
  if (auto v = get("c_lo")) c.c_lo = positive("c_lo", to_double("c_lo", *v));
  if (auto v = get("c_hi")) c.c_hi = positive("c_hi", to_double("c_hi", *v));
  if (!(c.c_lo < c.c_hi)) bad("c_hi", "must exceed c_lo");
  if (auto v = get("samples")) {
    c.samples = static_cast<std::size_t>(to_unsigned("samples", *v));
    if (c.samples < 2) bad("samples", "must be >= 2");
  }
  if (auto v = get("eigen_index"))
    c.eigen_index = static_cast<std::size_t>(to_unsigned("eigen_index", *v));
  if (auto v = get("dt")) c.dt = positive("dt", to_double("dt", *v));
  if (auto v = get("t_end")) c.t_end = positive("t_end", to_double("t_end", *v));
  if (auto v = get("amplitude")) c.amplitude = positive("amplitude", to_double("amplitude", *v));
  if (auto v = get("perturbation")) {
    if (*v != "mode" && *v != "random") bad("perturbation", "expected mode or random");
    c.perturbation = *v;
  }
  if (auto v = get("seed")) c.seed = to_unsigned("seed", *v);
  if (auto v = get("output")) {
    if (v->empty()) bad("output", "must not be empty");
    c.output = *v;
  }
  return c;
}

/// Flag and config-file front end. The config file is read first and any
/// flag given on the command line overrides it. `--help` sets `help_text`.
struct ParsedArgs {
  RunConfig config;
  std::optional<std::string> help_text;
};

inline ParsedArgs parse_args(int argc, const char* const* argv) {
  CLI::App app{"catena: soap-film bridge under electrostatic forcing"};
  std::map<std::string, std::string> flags;
  std::string positional;
  std::string config_file;
  app.add_option("command_pos", positional, "command (same as --command)");
  app.add_option("--config", config_file, "key = value configuration file");
  for (const auto& k : detail::config_keys()) {
    std::string name = k.key;
    std::string dashed = name;
    for (char& ch : dashed) {
      if (ch == '_') ch = '-';
    }
    const std::string names = dashed == name ? "--" + name : "--" + dashed + ",--" + name;
    app.add_option(names, flags[name], k.help);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    return {RunConfig{}, app.help()};
  } catch (const CLI::ParseError& e) {
    throw Error(ErrorKind::InvalidConfig, e.what());
  }

  std::map<std::string, std::string> kv;
  if (!config_file.empty()) {
    std::ifstream in(config_file);
    if (!in) throw Error(ErrorKind::InvalidConfig, "config: cannot read '" + config_file + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    kv = parse_config_text(ss.str());
  }
  if (!positional.empty()) kv["command"] = positional;
  for (const auto& k : detail::config_keys()) {
    std::string dashed = k.key;
    for (char& ch : dashed) {
      if (ch == '_') ch = '-';
    }
    if (app.count("--" + dashed) > 0) kv[k.key] = flags[k.key];
  }
  return {make_config(kv), std::nullopt};
}

}  // namespace catena::cli
