// rp-lab command line driver.
//
// Eight subcommands (potential-stats, survival, lyapunov, shape, rate, phase,
// eigen, ldp-check) share one flat option set.  Values are resolved in the
// order: built-in defaults, then --config key=value file, then flags.
// Validation failures exit 1 with messages that point at the config file line
// or the flag that supplied the offending value; runtime failures exit 2.
#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rplab/experiment.hpp"

namespace {

using rplab::ExperimentConfig;

struct Entry {
  std::string key, value;
  std::string origin;  // "config line N" or "--flag"
};

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

long parse_long(const std::string& s) {
  std::size_t used = 0;
  const long v = std::stol(s, &used);
  if (used != s.size()) throw std::invalid_argument("not an integer: " + s);
  return v;
}

std::uint64_t parse_u64(const std::string& s) {
  std::size_t used = 0;
  const unsigned long long v = std::stoull(s, &used);
  if (used != s.size()) throw std::invalid_argument("not an integer: " + s);
  return v;
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("not a number: " + s);
  return v;
}

bool parse_bool(const std::string& s) {
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  throw std::invalid_argument("not a boolean: " + s);
}

bool is_vector_key(const std::string& key) {
  return key == "x" || key == "h-vec" || key == "drift";
}

// Applies one key=value to the config; empty return means success.
std::string apply_key(ExperimentConfig& cfg, const std::string& key,
                      const std::string& val) {
  try {
    if (key == "family")
      cfg.potential.family = rplab::family_from_name(val);
    else if (key == "d")
      cfg.potential.dimension = static_cast<int>(parse_long(val));
    else if (key == "gamma")
      cfg.potential.gamma = parse_double(val);
    else if (key == "delta")
      cfg.potential.delta = parse_double(val);
    else if (key == "c9")
      cfg.potential.c9 = parse_double(val);
    else if (key == "nu")
      cfg.potential.nu = parse_double(val);
    else if (key == "m")
      cfg.potential.m = parse_double(val);
    else if (key == "big-m")
      cfg.potential.M = parse_double(val);
    else if (key == "halfwidth")
      cfg.potential.line_halfwidth = parse_double(val);
    else if (key == "c")
      cfg.potential.c = parse_double(val);
    else if (key == "dt")
      cfg.path.dt = parse_double(val);
    else if (key == "t-max")
      cfg.path.t_max = parse_double(val);
    else if (key == "bridge")
      cfg.path.bridge_correction = parse_bool(val);
    else if (key == "n-env")
      cfg.n_env = parse_long(val);
    else if (key == "n-paths")
      cfg.n_paths = parse_long(val);
    else if (key == "n-bootstrap")
      cfg.n_bootstrap = static_cast<int>(parse_long(val));
    else if (key == "dump-paths")
      cfg.dump_paths = parse_long(val);
    else if (key == "t-grid")
      cfg.t_grid = rplab::parse_double_list(val);
    else if (key == "lambda-grid")
      cfg.lambda_grid = rplab::parse_double_list(val);
    else if (key == "scales")
      cfg.scales = rplab::parse_double_list(val);
    else if (key == "r-grid")
      cfg.R_grid = rplab::parse_double_list(val);
    else if (key == "lambda")
      cfg.lambda = parse_double(val);
    else if (key == "mesh-h")
      cfg.mesh_h = parse_double(val);
    else if (key == "ball-radius")
      cfg.ball_radius = parse_double(val);
    else if (key == "slack")
      cfg.slack = parse_double(val);
    else if (key == "seed")
      cfg.seed = parse_u64(val);
    else if (key == "workers")
      cfg.workers = static_cast<int>(parse_long(val));
    else if (key == "out")
      cfg.out_dir = val;
    else if (key == "x")
      cfg.x = rplab::parse_vec(val, cfg.potential.dimension);
    else if (key == "h-vec")
      cfg.h_vec = rplab::parse_vec(val, cfg.potential.dimension);
    else if (key == "drift")
      cfg.path.drift = rplab::parse_vec(val, cfg.potential.dimension);
    else
      return "unknown key '" + key + "'";
  } catch (const std::exception& ex) {
    return ex.what();
  }
  return "";
}

// Flag spelling for each key (defaults to --<key>).
std::string flag_for(const std::string& key) {
  if (key == "big-m") return "--M";
  if (key == "r-grid") return "--R-grid";
  return "--" + key;
}

const std::vector<std::string>& all_keys() {
  static const std::vector<std::string> keys = {
      "family",     "d",         "gamma",     "delta",      "c9",
      "nu",         "m",         "big-m",     "halfwidth",  "c",
      "dt",         "t-max",     "bridge",    "drift",      "n-env",
      "n-paths",    "t-grid",    "lambda-grid", "scales",   "r-grid",
      "lambda",     "mesh-h",    "x",         "h-vec",      "ball-radius",
      "slack",      "n-bootstrap", "dump-paths", "seed",    "workers",
      "out"};
  return keys;
}

std::vector<Entry> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "error: cannot open config file '" << path << "'\n";
    std::exit(1);
  }
  std::vector<Entry> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      std::cerr << "error: config line " << lineno
                << ": expected key=value, got '" << t << "'\n";
      std::exit(1);
    }
    entries.push_back({trim(t.substr(0, eq)), trim(t.substr(eq + 1)),
                       "config line " + std::to_string(lineno)});
  }
  return entries;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "rp-lab: Brownian motion in stationary random potentials -- "
      "survival curves, Lyapunov exponents, spectral bottoms, rate "
      "functions and the drift phase diagram"};
  app.require_subcommand(1);

  // One shared holder; only the chosen subcommand parses into it.
  std::map<std::string, std::string> holder;
  std::string config_path;
  const struct {
    const char* kind;
    const char* desc;
  } subs[] = {
      {"potential-stats", "moments of V(0) against closed forms, cloud dump"},
      {"survival", "annealed-path survival curve S_t for one environment"},
      {"lyapunov", "alpha_lambda(x) over a lambda grid and scale grid"},
      {"shape", "directional a(0,ru)/r convergence diagnostic"},
      {"rate", "rate function I(x) with sandwich bounds"},
      {"phase", "ballistic/sub-ballistic verdict and lambda_h for drift h"},
      {"eigen", "principal Dirichlet eigenvalue sweep over domain radii"},
      {"ldp-check", "empirical endpoint rates against the rate function"},
  };
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.kind, s.desc);
    for (const std::string& key : all_keys())
      sub->add_option(flag_for(key), holder[key]);
    sub->add_option("--config", config_path,
                    "key=value file applied before flags");
  }

  CLI11_PARSE(app, argc, argv);
  CLI::App* sub = app.get_subcommands().front();

  ExperimentConfig cfg;
  cfg.kind = rplab::experiment_kind_from_name(sub->get_name());

  std::vector<Entry> entries;
  if (!config_path.empty()) {
    for (Entry& e : read_config_file(config_path)) entries.push_back(e);
    // Unknown file keys are reported with their line before anything runs.
    for (const Entry& e : entries) {
      if (std::find(all_keys().begin(), all_keys().end(), e.key) ==
          all_keys().end()) {
        std::cerr << "error: " << e.origin << ": unknown key '" << e.key
                  << "'\n";
        return 1;
      }
    }
  }
  for (const std::string& key : all_keys()) {
    const CLI::Option* opt = sub->get_option_no_throw(flag_for(key));
    if (opt && opt->count() > 0)
      entries.push_back({key, holder[key], flag_for(key)});
  }

  // Scalars first so the dimension is fixed before vectors are parsed.
  std::map<std::string, std::string> origin_of;
  for (int pass = 0; pass < 2; ++pass) {
    for (const Entry& e : entries) {
      if (is_vector_key(e.key) != (pass == 1)) continue;
      if (const std::string msg = apply_key(cfg, e.key, e.value); !msg.empty()) {
        std::cerr << "error: " << e.origin << " (" << e.key << "): " << msg
                  << "\n";
        return 1;
      }
      origin_of[e.key] = e.origin;
    }
  }

  const std::vector<rplab::ConfigViolation> violations = rplab::validate(cfg);
  if (!violations.empty()) {
    for (const rplab::ConfigViolation& v : violations) {
      const auto it = origin_of.find(v.field);
      const std::string where =
          it != origin_of.end() ? it->second : "(default)";
      std::cerr << "error: " << where << " (" << v.field << "): " << v.message
                << "\n";
    }
    return 1;
  }

  try {
    const std::vector<std::string> artifacts = rplab::run(cfg);
    for (const std::string& a : artifacts)
      std::cout << cfg.out_dir << "/" << a << "\n";
  } catch (const std::exception& ex) {
    std::cerr << "runtime error: " << ex.what() << "\n";
    return 2;
  }
  return 0;
}
