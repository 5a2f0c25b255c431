#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "upb/fock.hpp"
#include "upb/jackknife.hpp"
#include "upb/lattice.hpp"

namespace upb::master {

/// Pure state over the tensor-product basis.
struct QuantumState {
  Eigen::VectorXcd amplitudes;
  double norm = 1.0;

  static QuantumState vacuum(const FockBasis& basis);
};

/// Settings of a quantum-trajectory ensemble. Times are in units of
/// hbar / intracell coupling.
struct TrajectoryConfig {
  double beta = 0.1;  // shift of every jump operator, L -> L + beta
  double t_relax = 1000.0;
  double t_record = 10000.0;
  std::size_t n_traj = 10;
  std::uint64_t seed = 1;
  double rel_tol = 1e-12;
  double abs_tol = 1e-12;
  double sample_interval = 1.0;
  std::optional<std::size_t> signal_site;  // defaults to n_sites - 2

  void validate() const;
  std::size_t signal(std::size_t n_sites) const;
};

struct TrajectoryStats {
  std::optional<Estimate> g2_zero;       // empty when the mean occupation vanishes
  Estimate pair_correlation;             // <a^+ a^+ a a> on the signal site
  std::vector<Estimate> occupations;     // per site
  std::vector<double> tau;
  std::vector<Estimate> g2_tau;
  std::vector<std::size_t> jump_count;   // per trajectory
  std::size_t resampled = 0;             // g2_tau restarts after a_s annihilated the state
  std::size_t signal_site = 0;

  // Per-trajectory time averages on the signal site.
  std::vector<double> trajectory_occupation;
  std::vector<double> trajectory_pair;

  std::size_t total_jumps() const;
  /// Throws UndefinedCorrelationError when g2_zero is empty.
  const Estimate& g2() const;
};

/// One record per sample of the recording window.
struct Sample {
  std::size_t trajectory = 0;
  double time = 0.0;
  double occupation = 0.0;
  double pair = 0.0;
};

/// Receives samples ordered by trajectory index, then time.
using SampleSink = std::function<void(const Sample&)>;

/// Ensemble of norm-decay quantum trajectories for the shifted unraveling
/// {sqrt(gamma) a_j + beta, sqrt(kappa) n_j + beta}. Trajectory i uses the
/// seed `cfg.seed ^ i`.
TrajectoryStats wfmc_run(const LatticeSpec& spec, const FockSpec& fock, const TrajectoryConfig& cfg,
                         const SampleSink& sink = {});

/// As wfmc_run, then per trajectory applies a_s at the end of the recording
/// window and propagates the conditional state over `tau_grid` to estimate
/// g2(tau) = <a^+(0) n(tau) a(0)> / <n>^2.
TrajectoryStats g2_tau(const LatticeSpec& spec, const FockSpec& fock, const TrajectoryConfig& cfg,
                       const std::vector<double>& tau_grid, const SampleSink& sink = {});

/// Jump times are located to this width by bisection of the norm decay.
inline constexpr double kJumpTimeTolerance = 1e-10;

}  // namespace upb::master
