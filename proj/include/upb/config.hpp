#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "upb/error.hpp"
#include "upb/fock.hpp"
#include "upb/lattice.hpp"
#include "upb/sweep.hpp"
#include "upb/trajectory.hpp"
#include "upb/weakdrive.hpp"

namespace upb::cli {

enum class Command { weakdrive_map, wfmc_run, g2tau, optimal_params, alpha_scan, oracle_check };
enum class Format { csv, json };

const char* to_string(Command c);
const char* to_string(Format f);

/// Bad command line or config file. Maps to exit code 2.
class UsageError : public Error {
public:
  explicit UsageError(const std::string& what, std::string module = "cli")
      : Error(std::move(module), what) {}
};

/// Effective settings of one invocation. Energies are in units of the
/// intracell coupling, times in hbar / intracell coupling.
struct RunConfig {
  Command command = Command::optimal_params;

  std::size_t n_sites = 2;
  double t = 0.1;
  double energy = 0.0;
  double gamma = 0.3;
  double alpha = 0.0;
  double kappa = 0.0;
  double f1 = 1e-4;
  bool at_optimum = false;       // replace energy and alpha by the closed-form optimum
  std::size_t signal_site = 0;   // 1-based; 0 selects site N-1

  std::vector<unsigned> cutoffs;  // empty: 3 on every site
  double fock_budget = 1e6;

  double beta = 0.1;
  double t_relax = 1000.0;
  double t_record = 10000.0;
  std::size_t n_traj = 10;
  std::uint64_t seed = 1;
  double rel_tol = 1e-12;
  double abs_tol = 1e-12;
  double sample_interval = 1.0;

  double e_min = -0.5;
  double e_max = 0.5;
  std::size_t e_count = 201;
  double gamma_min = 1.0 / 201.0;
  double gamma_max = 1.0;
  std::size_t gamma_count = 201;
  weakdrive::Method method = weakdrive::Method::perturbative;

  double tau_max = 0.0;  // 0: 20 / gamma
  std::size_t tau_count = 201;

  double alpha_lo = 0.0;  // 0: a decade below the closed-form optimum
  double alpha_hi = 0.0;  // 0: a decade above

  std::string output = "-";
  Format format = Format::csv;
  std::string samples;        // JSONL sample stream for wfmc-run and g2tau
  std::string singularities;  // singularity CSV for weakdrive-map

  bool operator==(const RunConfig&) const = default;

  /// Throws UsageError for out-of-range values.
  void validate() const;

  /// Lattice with drive F1 on the first site; honours at_optimum.
  LatticeSpec lattice() const;
  master::FockSpec fock() const;
  master::TrajectoryConfig trajectory() const;
  sweep::GridSpec grid() const;
  std::vector<double> tau_grid() const;
  std::size_t signal_index() const;  // 0-based
};

/// Parses `upb <command> [--flag value ...]`. A `--config FILE` of key=value
/// lines is applied first; flags override it. Throws UsageError.
RunConfig parse_config(const std::vector<std::string>& args);

/// key=value lines (blank lines and '#' comments allowed) applied on top of `base`.
RunConfig parse_config_text(const std::string& text, RunConfig base = {});

/// Every field as key=value lines, doubles with 17 significant digits.
std::string to_config_text(const RunConfig& cfg);

std::string usage();

/// Dispatches to the owning module and writes outputs. Returns 0 on success,
/// 1 on computational error, 2 on usage error; errors go to `err`.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Full entry point: parse argv, run, map errors to exit codes.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace upb::cli
