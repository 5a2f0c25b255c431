#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>

#include <json.hpp>

#include "upb/analytics.hpp"
#include "upb/config.hpp"
#include "upb/liouvillian.hpp"
#include "upb/sweep.hpp"
#include "upb/trajectory.hpp"
#include "upb/weakdrive.hpp"

namespace upb::cli {
namespace {

using json = nlohmann::json;

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Doubles that are not finite become null in JSON output.
json jnum(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

const char* kUnits = "units: energies in intracell coupling, time in hbar/intracell coupling";

class Output {
public:
  explicit Output(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (path != "-" && !path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw UsageError("cannot open output file '" + path + "'");
      stream_ = file_.get();
    }
  }
  std::ostream& operator*() { return *stream_; }

private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

void write_header(std::ostream& os, const RunConfig& cfg) {
  os << "# upb " << to_string(cfg.command) << "\n# " << kUnits << "\n";
  std::istringstream lines(to_config_text(cfg));
  std::string line;
  while (std::getline(lines, line)) os << "# " << line << "\n";
}

json config_json(const RunConfig& cfg) {
  json c = json::object();
  std::istringstream lines(to_config_text(cfg));
  std::string line;
  while (std::getline(lines, line)) {
    const auto eq = line.find('=');
    c[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return c;
}

json document(const RunConfig& cfg) {
  return json{{"command", to_string(cfg.command)}, {"units", kUnits}, {"config", config_json(cfg)}};
}

master::SampleSink sample_sink(const std::string& path, std::unique_ptr<std::ofstream>& file) {
  if (path.empty()) return {};
  file = std::make_unique<std::ofstream>(path);
  if (!*file) throw UsageError("cannot open samples file '" + path + "'");
  std::ofstream* f = file.get();
  return [f](const master::Sample& s) {
    *f << json{{"trajectory", s.trajectory}, {"time", s.time}, {"n_s", s.occupation}, {"pair", s.pair}}.dump()
       << "\n";
  };
}

int weakdrive_map(const RunConfig& cfg, std::ostream& out) {
  sweep::ZMap map = sweep::z_grid_map(cfg.grid(), cfg.method);
  const bool want_sing = !cfg.singularities.empty() || cfg.format == Format::json;
  if (want_sing) map.singularities = sweep::find_phase_singularities(map);
  const auto& g = map.grid;

  Output o(cfg.output, out);
  if (cfg.format == Format::csv) {
    write_header(*o, cfg);
    *o << "E,gamma,re_amp,im_amp,g2\n";
    for (std::size_t ie = 0; ie < g.energy.count; ++ie) {
      for (std::size_t ig = 0; ig < g.gamma.count; ++ig) {
        const std::size_t k = map.index(ie, ig);
        *o << num(g.energy.at(ie)) << ',' << num(g.gamma.at(ig)) << ',' << num(map.amplitude[k].real()) << ','
           << num(map.amplitude[k].imag()) << ',' << num(map.g2[k]) << '\n';
      }
    }
  } else {
    json doc = document(cfg);
    json rows = json::array();
    for (std::size_t ie = 0; ie < g.energy.count; ++ie) {
      for (std::size_t ig = 0; ig < g.gamma.count; ++ig) {
        const std::size_t k = map.index(ie, ig);
        rows.push_back({{"E", g.energy.at(ie)}, {"gamma", g.gamma.at(ig)}, {"re_amp", jnum(map.amplitude[k].real())},
                        {"im_amp", jnum(map.amplitude[k].imag())}, {"g2", jnum(map.g2[k])}});
      }
    }
    doc["rows"] = std::move(rows);
    json sing = json::array();
    for (const auto& s : map.singularities) {
      sing.push_back({{"re_z", s.z.real()}, {"im_z", s.z.imag()}, {"winding", s.winding}});
    }
    doc["singularities"] = std::move(sing);
    *o << doc.dump(2) << "\n";
  }
  if (!cfg.singularities.empty()) {
    std::ofstream f(cfg.singularities);
    if (!f) throw UsageError("cannot open singularities file '" + cfg.singularities + "'");
    write_header(f, cfg);
    f << "re_z,im_z,winding\n";
    for (const auto& s : map.singularities) f << num(s.z.real()) << ',' << num(s.z.imag()) << ',' << s.winding << '\n';
  }
  return 0;
}

int wfmc_summary(const RunConfig& cfg, std::ostream& out) {
  std::unique_ptr<std::ofstream> samples;
  const auto sink = sample_sink(cfg.samples, samples);
  const master::TrajectoryStats stats = master::wfmc_run(cfg.lattice(), cfg.fock(), cfg.trajectory(), sink);

  struct Row {
    std::string name;
    master::Estimate value;
  };
  std::vector<Row> rows;
  rows.push_back({"g2", stats.g2()});
  rows.push_back({"pair_correlation", stats.pair_correlation});
  for (std::size_t j = 0; j < stats.occupations.size(); ++j) {
    rows.push_back({"occupation_" + std::to_string(j + 1), stats.occupations[j]});
  }
  std::vector<double> jumps(stats.jump_count.begin(), stats.jump_count.end());
  rows.push_back({"jumps", master::jackknife(jumps)});

  Output o(cfg.output, out);
  if (cfg.format == Format::csv) {
    write_header(*o, cfg);
    *o << "observable,mean,jackknife_err,n_traj,seed\n";
    for (const auto& r : rows) {
      *o << r.name << ',' << num(r.value.mean) << ',' << num(r.value.error) << ',' << cfg.n_traj << ',' << cfg.seed
         << '\n';
    }
  } else {
    json doc = document(cfg);
    json arr = json::array();
    for (const auto& r : rows) {
      arr.push_back({{"observable", r.name}, {"mean", jnum(r.value.mean)}, {"jackknife_err", jnum(r.value.error)},
                     {"n_traj", cfg.n_traj}, {"seed", cfg.seed}});
    }
    doc["rows"] = std::move(arr);
    *o << doc.dump(2) << "\n";
  }
  return 0;
}

int g2tau(const RunConfig& cfg, std::ostream& out) {
  std::unique_ptr<std::ofstream> samples;
  const auto sink = sample_sink(cfg.samples, samples);
  const master::TrajectoryStats stats =
      master::g2_tau(cfg.lattice(), cfg.fock(), cfg.trajectory(), cfg.tau_grid(), sink);
  Output o(cfg.output, out);
  if (cfg.format == Format::csv) {
    write_header(*o, cfg);
    *o << "# resampled=" << stats.resampled << "\n";
    *o << "tau,g2,g2_err\n";
    for (std::size_t k = 0; k < stats.tau.size(); ++k) {
      *o << num(stats.tau[k]) << ',' << num(stats.g2_tau[k].mean) << ',' << num(stats.g2_tau[k].error) << '\n';
    }
  } else {
    json doc = document(cfg);
    doc["resampled"] = stats.resampled;
    json arr = json::array();
    for (std::size_t k = 0; k < stats.tau.size(); ++k) {
      arr.push_back({{"tau", stats.tau[k]}, {"g2", jnum(stats.g2_tau[k].mean)}, {"g2_err", jnum(stats.g2_tau[k].error)}});
    }
    doc["rows"] = std::move(arr);
    *o << doc.dump(2) << "\n";
  }
  return 0;
}

int optimal_params(const RunConfig& cfg, std::ostream& out) {
  const auto p = analytics::optimal_point(cfg.n_sites, cfg.gamma);
  Output o(cfg.output, out);
  if (cfg.format == Format::csv) {
    write_header(*o, cfg);
    *o << "n_sites,gamma,theta,E,alpha,re_z,im_z\n";
    *o << cfg.n_sites << ',' << num(cfg.gamma) << ',' << num(p.theta) << ',' << num(p.energy) << ',' << num(p.alpha)
       << ',' << num(p.z.real()) << ',' << num(p.z.imag()) << '\n';
  } else {
    json doc = document(cfg);
    doc["rows"] = json::array({{{"n_sites", cfg.n_sites}, {"gamma", cfg.gamma}, {"theta", p.theta}, {"E", p.energy},
                                {"alpha", p.alpha}, {"re_z", p.z.real()}, {"im_z", p.z.imag()}}});
    *o << doc.dump(2) << "\n";
  }
  return 0;
}

int alpha_scan(const RunConfig& cfg, std::ostream& out) {
  const auto p = analytics::optimal_point(cfg.n_sites, cfg.gamma);
  const double lo = cfg.alpha_lo > 0.0 ? cfg.alpha_lo : p.alpha / 10.0;
  const double hi = cfg.alpha_hi > 0.0 ? cfg.alpha_hi : p.alpha * 10.0;
  sweep::AlphaScanOptions opts;
  opts.f1 = cfg.f1;
  opts.method = cfg.method;
  opts.signal_site = cfg.signal_index();
  const double a = sweep::optimal_alpha_scan(cfg.n_sites, cfg.t, cfg.gamma, lo, hi, opts);
  const double rel = (a - p.alpha) / p.alpha;
  Output o(cfg.output, out);
  if (cfg.format == Format::csv) {
    write_header(*o, cfg);
    *o << "n_sites,t,gamma,E,alpha_scan,alpha_closed_form,rel_diff\n";
    *o << cfg.n_sites << ',' << num(cfg.t) << ',' << num(cfg.gamma) << ',' << num(p.energy) << ',' << num(a) << ','
       << num(p.alpha) << ',' << num(rel) << '\n';
  } else {
    json doc = document(cfg);
    doc["rows"] = json::array({{{"n_sites", cfg.n_sites}, {"t", cfg.t}, {"gamma", cfg.gamma}, {"E", p.energy},
                                {"alpha_scan", a}, {"alpha_closed_form", p.alpha}, {"rel_diff", rel}}});
    *o << doc.dump(2) << "\n";
  }
  return 0;
}

constexpr double kOracleTolerance = 0.05;

int oracle_check(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const LatticeSpec spec = cfg.lattice();
  const std::size_t s = cfg.signal_index();
  const double g2_weak = weakdrive::g2_zero_delay(weakdrive::solve(spec, weakdrive::Method::exact), s);
  const double g2_liou = master::liouvillian_steady_state(spec, cfg.fock()).g2(s);
  const double rel = std::abs(g2_weak - g2_liou) / std::abs(g2_liou);
  const bool pass = rel < kOracleTolerance;
  Output o(cfg.output, out);
  if (cfg.format == Format::csv) {
    write_header(*o, cfg);
    *o << "quantity,value\n";
    *o << "g2_weakdrive," << num(g2_weak) << "\ng2_liouvillian," << num(g2_liou) << "\nrel_discrepancy," << num(rel)
       << "\ntolerance," << num(kOracleTolerance) << "\npass," << (pass ? 1 : 0) << '\n';
  } else {
    json doc = document(cfg);
    doc["rows"] = {{"g2_weakdrive", g2_weak}, {"g2_liouvillian", g2_liou}, {"rel_discrepancy", rel},
                   {"tolerance", kOracleTolerance}, {"pass", pass}};
    *o << doc.dump(2) << "\n";
  }
  if (!pass) {
    err << "error [cli]: weak-drive and Liouvillian g2 differ by " << rel << " (tolerance " << kOracleTolerance
        << ")\n";
    return 1;
  }
  return 0;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    cfg.validate();
    switch (cfg.command) {
      case Command::weakdrive_map: return weakdrive_map(cfg, out);
      case Command::wfmc_run: return wfmc_summary(cfg, out);
      case Command::g2tau: return g2tau(cfg, out);
      case Command::optimal_params: return optimal_params(cfg, out);
      case Command::alpha_scan: return alpha_scan(cfg, out);
      case Command::oracle_check: return oracle_check(cfg, out, err);
    }
  } catch (const UsageError& e) {
    err << "error [" << e.module() << "]: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error [" << e.module() << "]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error [upb]: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(argv + (argc > 0 ? 1 : 0), argv + argc);
  if (args.empty()) {
    err << usage();
    return 2;
  }
  if (std::find(args.begin(), args.end(), "--help") != args.end() ||
      std::find(args.begin(), args.end(), "-h") != args.end()) {
    out << usage();
    return 0;
  }
  RunConfig cfg;
  try {
    cfg = parse_config(args);
  } catch (const UsageError& e) {
    err << "error [" << e.module() << "]: " << e.what() << "\n\n" << usage();
    return 2;
  }
  return run(cfg, out, err);
}

}  // namespace upb::cli
