#include "upb/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "upb/analytics.hpp"

namespace upb::cli {
namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw UsageError("invalid number for " + key + ": '" + v + "'");
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    if (!v.empty() && v[0] != '-') {
      const unsigned long long u = std::stoull(v, &pos);
      if (pos == v.size()) return u;
    }
  } catch (const std::exception&) {
  }
  throw UsageError("invalid non-negative integer for " + key + ": '" + v + "'");
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw UsageError("invalid boolean for " + key + ": '" + v + "'");
}

Command parse_command(const std::string& v) {
  static const std::map<std::string, Command> table{
      {"weakdrive-map", Command::weakdrive_map}, {"wfmc-run", Command::wfmc_run},
      {"g2tau", Command::g2tau},                 {"optimal-params", Command::optimal_params},
      {"alpha-scan", Command::alpha_scan},       {"oracle-check", Command::oracle_check}};
  const auto it = table.find(v);
  if (it == table.end()) throw UsageError("unknown command '" + v + "'");
  return it->second;
}

struct Key {
  std::string name;  // config-file key; the flag is --name with '_' -> '-'
  std::string help;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
  bool is_flag = false;
};

template <class T>
Key real(const char* name, T RunConfig::*field, const char* help) {
  return {name, help, [=](RunConfig& c, const std::string& v) { c.*field = parse_double(name, v); },
          [=](const RunConfig& c) { return format_double(c.*field); }};
}

template <class T>
Key integer(const char* name, T RunConfig::*field, const char* help) {
  return {name, help, [=](RunConfig& c, const std::string& v) { c.*field = static_cast<T>(parse_unsigned(name, v)); },
          [=](const RunConfig& c) { return std::to_string(c.*field); }};
}

Key text(const char* name, std::string RunConfig::*field, const char* help) {
  return {name, help, [=](RunConfig& c, const std::string& v) { c.*field = v; },
          [=](const RunConfig& c) { return c.*field; }};
}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = [] {
    std::vector<Key> k;
    k.push_back(integer("n_sites", &RunConfig::n_sites, "number of resonators (even)"));
    k.push_back(real("t", &RunConfig::t, "intercell coupling"));
    k.push_back(real("energy", &RunConfig::energy, "onsite energy E"));
    k.push_back(real("gamma", &RunConfig::gamma, "loss rate"));
    k.push_back(real("alpha", &RunConfig::alpha, "Kerr coefficient"));
    k.push_back(real("kappa", &RunConfig::kappa, "pure dephasing rate"));
    k.push_back(real("f1", &RunConfig::f1, "drive amplitude on site 1"));
    k.push_back({"at_optimum", "use the closed-form optimal E and alpha for gamma",
                 [](RunConfig& c, const std::string& v) { c.at_optimum = parse_bool("at_optimum", v); },
                 [](const RunConfig& c) { return std::string(c.at_optimum ? "true" : "false"); }, true});
    k.push_back(integer("signal_site", &RunConfig::signal_site, "signal resonator, 1-based (0: N-1)"));
    k.push_back({"cutoffs", "Fock cutoffs: one value for all sites or a comma list",
                 [](RunConfig& c, const std::string& v) {
                   c.cutoffs.clear();
                   std::stringstream ss(v);
                   std::string item;
                   while (std::getline(ss, item, ',')) {
                     if (item.empty()) continue;
                     c.cutoffs.push_back(static_cast<unsigned>(parse_unsigned("cutoffs", item)));
                   }
                 },
                 [](const RunConfig& c) {
                   std::string s;
                   for (std::size_t i = 0; i < c.cutoffs.size(); ++i) s += (i ? "," : "") + std::to_string(c.cutoffs[i]);
                   return s;
                 }});
    k.push_back(real("fock_budget", &RunConfig::fock_budget, "largest Fock dimension"));
    k.push_back(real("beta", &RunConfig::beta, "jump-operator shift"));
    k.push_back(real("t_relax", &RunConfig::t_relax, "relaxation time discarded"));
    k.push_back(real("t_record", &RunConfig::t_record, "recording time"));
    k.push_back(integer("n_traj", &RunConfig::n_traj, "number of trajectories"));
    k.push_back(integer("seed", &RunConfig::seed, "base RNG seed"));
    k.push_back(real("rel_tol", &RunConfig::rel_tol, "integrator relative tolerance"));
    k.push_back(real("abs_tol", &RunConfig::abs_tol, "integrator absolute tolerance"));
    k.push_back(real("sample_interval", &RunConfig::sample_interval, "time between samples"));
    k.push_back(real("e_min", &RunConfig::e_min, "map: lowest E"));
    k.push_back(real("e_max", &RunConfig::e_max, "map: highest E"));
    k.push_back(integer("e_count", &RunConfig::e_count, "map: points along E"));
    k.push_back(real("gamma_min", &RunConfig::gamma_min, "map: lowest gamma (> 0)"));
    k.push_back(real("gamma_max", &RunConfig::gamma_max, "map: highest gamma"));
    k.push_back(integer("gamma_count", &RunConfig::gamma_count, "map: points along gamma"));
    k.push_back({"method", "weak-drive solver: exact or perturbative",
                 [](RunConfig& c, const std::string& v) {
                   try {
                     c.method = weakdrive::method_from_string(v);
                   } catch (const Error& e) {
                     throw UsageError(e.what());
                   }
                 },
                 [](const RunConfig& c) { return std::string(weakdrive::to_string(c.method)); }});
    k.push_back(real("tau_max", &RunConfig::tau_max, "g2tau: largest delay (0: 20/gamma)"));
    k.push_back(integer("tau_count", &RunConfig::tau_count, "g2tau: number of delays"));
    k.push_back(real("alpha_lo", &RunConfig::alpha_lo, "alpha-scan: lower bracket (0: auto)"));
    k.push_back(real("alpha_hi", &RunConfig::alpha_hi, "alpha-scan: upper bracket (0: auto)"));
    k.push_back(text("output", &RunConfig::output, "output file ('-' for stdout)"));
    k.push_back({"format", "csv or json",
                 [](RunConfig& c, const std::string& v) {
                   if (v == "csv") {
                     c.format = Format::csv;
                   } else if (v == "json") {
                     c.format = Format::json;
                   } else {
                     throw UsageError("format must be csv or json");
                   }
                 },
                 [](const RunConfig& c) { return std::string(to_string(c.format)); }});
    k.push_back(text("samples", &RunConfig::samples, "JSONL file for raw trajectory samples"));
    k.push_back(text("singularities", &RunConfig::singularities, "CSV file for detected singularities"));
    return k;
  }();
  return table;
}

const Key* find_key(const std::string& name) {
  for (const Key& k : keys()) {
    if (k.name == name) return &k;
  }
  return nullptr;
}

std::string flag_name(const std::string& key) {
  std::string f = key;
  std::replace(f.begin(), f.end(), '_', '-');
  return "--" + f;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

void build_app(CLI::App& app, std::string& command, std::string& config_path,
               std::map<std::string, std::string>& values, std::map<std::string, bool>& flags) {
  app.add_option("command", command,
                 "weakdrive-map | wfmc-run | g2tau | optimal-params | alpha-scan | oracle-check");
  app.add_option("--config", config_path, "file of key=value lines; flags override it");
  for (const Key& k : keys()) {
    if (k.is_flag) {
      app.add_flag(flag_name(k.name), flags[k.name], k.help);
    } else {
      const std::string names = k.name == "energy" ? flag_name(k.name) + ",-E" : flag_name(k.name);
      app.add_option(names, values[k.name], k.help);
    }
  }
}

}  // namespace

const char* to_string(Command c) {
  switch (c) {
    case Command::weakdrive_map: return "weakdrive-map";
    case Command::wfmc_run: return "wfmc-run";
    case Command::g2tau: return "g2tau";
    case Command::optimal_params: return "optimal-params";
    case Command::alpha_scan: return "alpha-scan";
    case Command::oracle_check: return "oracle-check";
  }
  return "?";
}

const char* to_string(Format f) { return f == Format::csv ? "csv" : "json"; }

RunConfig parse_config_text(const std::string& text, RunConfig base) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string l = trim(line);
    if (l.empty() || l[0] == '#') continue;
    const auto eq = l.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config line " + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(l.substr(0, eq));
    const std::string value = trim(l.substr(eq + 1));
    if (key == "command") {
      base.command = parse_command(value);
      continue;
    }
    const Key* k = find_key(key);
    if (!k) throw UsageError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    k->set(base, value);
  }
  return base;
}

std::string to_config_text(const RunConfig& cfg) {
  std::string s = std::string("command=") + to_string(cfg.command) + "\n";
  for (const Key& k : keys()) s += k.name + "=" + k.get(cfg) + "\n";
  return s;
}

std::string usage() {
  CLI::App app{"Unconventional photon blockade in driven dimer chains", "upb"};
  std::string command, config_path;
  std::map<std::string, std::string> values;
  std::map<std::string, bool> flags;
  build_app(app, command, config_path, values, flags);
  return app.help();
}

RunConfig parse_config(const std::vector<std::string>& args) {
  if (args.empty()) throw UsageError("no command given");
  CLI::App app{"Unconventional photon blockade in driven dimer chains", "upb"};
  std::string command, config_path;
  std::map<std::string, std::string> values;
  std::map<std::string, bool> flags;
  build_app(app, command, config_path, values, flags);
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  RunConfig cfg;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw UsageError("cannot read config file '" + config_path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    cfg = parse_config_text(ss.str(), cfg);
  }
  if (command.empty()) throw UsageError("missing required command");
  cfg.command = parse_command(command);
  for (const Key& k : keys()) {
    const auto* opt = app.get_option(flag_name(k.name));
    if (opt->count() == 0) continue;
    if (k.is_flag) {
      k.set(cfg, flags[k.name] ? "true" : "false");
    } else {
      k.set(cfg, values[k.name]);
    }
  }
  cfg.validate();
  return cfg;
}

void RunConfig::validate() const {
  try {
    lattice().validate();
    if (!(gamma > 0.0) && command != Command::weakdrive_map) throw UsageError("gamma must be > 0");
    if (signal_site > n_sites) throw UsageError("signal_site must be in 1..n_sites");
    switch (command) {
      case Command::wfmc_run:
      case Command::g2tau:
        fock().validate(n_sites);
        trajectory().validate();
        if (command == Command::g2tau && (tau_count < 2 || tau_max < 0.0)) {
          throw UsageError("tau_count must be >= 2 and tau_max >= 0");
        }
        break;
      case Command::oracle_check:
        fock().validate(n_sites);
        break;
      case Command::weakdrive_map:
        grid().validate();
        break;
      case Command::alpha_scan:
        if (alpha_lo < 0.0 || alpha_hi < 0.0 || (alpha_lo > 0.0 && alpha_hi > 0.0 && alpha_hi <= alpha_lo)) {
          throw UsageError("alpha bracket must satisfy 0 < alpha_lo < alpha_hi");
        }
        break;
      case Command::optimal_params:
        break;
    }
  } catch (const UsageError&) {
    throw;
  } catch (const Error& e) {
    throw UsageError(e.what(), e.module());
  }
}

LatticeSpec RunConfig::lattice() const {
  double e = energy;
  double a = alpha;
  if (at_optimum) {
    if (!(gamma > 0.0)) throw UsageError("at_optimum needs gamma > 0");
    const auto opt = analytics::optimal_point(n_sites, gamma);
    e = opt.energy;
    a = opt.alpha;
  }
  return LatticeSpec::driven_first_site(n_sites, t, e, gamma, a, f1, kappa);
}

master::FockSpec RunConfig::fock() const {
  master::FockSpec f;
  if (cutoffs.empty()) {
    f.cutoffs.assign(n_sites, 3);
  } else if (cutoffs.size() == 1) {
    f.cutoffs.assign(n_sites, cutoffs[0]);
  } else {
    f.cutoffs = cutoffs;
  }
  f.budget = fock_budget;
  return f;
}

std::size_t RunConfig::signal_index() const {
  return signal_site == 0 ? weakdrive::default_signal_site(n_sites) : signal_site - 1;
}

master::TrajectoryConfig RunConfig::trajectory() const {
  master::TrajectoryConfig c;
  c.beta = beta;
  c.t_relax = t_relax;
  c.t_record = t_record;
  c.n_traj = n_traj;
  c.seed = seed;
  c.rel_tol = rel_tol;
  c.abs_tol = abs_tol;
  c.sample_interval = sample_interval;
  c.signal_site = signal_index();
  return c;
}

sweep::GridSpec RunConfig::grid() const {
  sweep::GridSpec g;
  g.energy = {e_min, e_max, e_count};
  g.gamma = {gamma_min, gamma_max, gamma_count};
  g.fixed = lattice();
  g.signal_site = signal_index();
  return g;
}

std::vector<double> RunConfig::tau_grid() const {
  const double top = tau_max > 0.0 ? tau_max : 20.0 / gamma;
  std::vector<double> tau(tau_count);
  for (std::size_t k = 0; k < tau_count; ++k) {
    tau[k] = top * static_cast<double>(k) / static_cast<double>(tau_count - 1);
  }
  return tau;
}

}  // namespace upb::cli
