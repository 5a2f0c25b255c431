#include "upb/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "upb/error.hpp"
#include "upb/parallel.hpp"

namespace upb::master {
namespace {

namespace odeint = boost::numeric::odeint;

const char* kModule = "master";

using State = std::vector<cplx>;
using Stepper = odeint::runge_kutta_dopri5<State>;
using DenseStepper = odeint::result_of::make_dense_output<Stepper>::type;

// Relative size of a_s|psi> below which the conditional state is undefined.
constexpr double kAnnihilationFloor = 1e-14;
constexpr std::size_t kMaxResamples = 10000;

Eigen::Map<const Eigen::VectorXcd> view(const State& x) {
  return {x.data(), static_cast<Eigen::Index>(x.size())};
}
Eigen::Map<Eigen::VectorXcd> view(State& x) { return {x.data(), static_cast<Eigen::Index>(x.size())}; }

// Operators shared read-only by every trajectory. All of them act on graded
// amplitudes psi_k / scale^n_k.
struct Engine {
  std::size_t dim = 0;
  std::size_t n_sites = 0;
  std::size_t signal = 0;
  double beta = 0.0;
  SparseMatrix generator;             // -i * drift
  std::vector<SparseMatrix> channels; // unshifted jump operators
  SparseMatrix annihilate_signal;
  Eigen::VectorXd weight;             // scale^(2 n)
  std::vector<Eigen::VectorXd> number;
  Eigen::VectorXd pair_signal;

  Engine(const LatticeSpec& spec, const FockSpec& fock, const TrajectoryConfig& cfg) {
    const OperatorSet ops = build_operators(spec, fock);
    const FockBasis& basis = ops.basis;
    const double scale = grading_scale(spec);
    dim = basis.dimension();
    n_sites = spec.n_sites;
    signal = cfg.signal(spec.n_sites);
    beta = cfg.beta;
    generator = graded(cplx{0.0, -1.0} * ops.drift(spec, beta), basis, scale);
    for (std::size_t j = 0; j < n_sites; ++j) {
      if (spec.loss > 0.0) channels.push_back(graded(std::sqrt(spec.loss) * ops.annihilation[j], basis, scale));
      if (spec.dephasing > 0.0) channels.push_back(std::sqrt(spec.dephasing) * diagonal_matrix(ops.number[j]));
    }
    annihilate_signal = graded(ops.annihilation[signal], basis, scale);
    weight.resize(static_cast<Eigen::Index>(dim));
    for (std::size_t k = 0; k < dim; ++k) {
      weight(static_cast<Eigen::Index>(k)) = std::pow(scale, 2.0 * basis.total_photons(k));
    }
    number = ops.number;
    pair_signal = ops.pair[signal];
  }

  double norm2(const Eigen::Ref<const Eigen::VectorXcd>& x) const {
    return (weight.array() * x.array().abs2()).sum();
  }

  struct Moments {
    std::vector<double> occupation;
    double pair = 0.0;
  };

  Moments moments(const State& x) const {
    Moments m;
    m.occupation.assign(n_sites, 0.0);
    const auto v = view(x);
    const Eigen::ArrayXd p = weight.array() * v.array().abs2();
    const double norm = p.sum();
    for (std::size_t j = 0; j < n_sites; ++j) m.occupation[j] = (p * number[j].array()).sum() / norm;
    m.pair = (p * pair_signal.array()).sum() / norm;
    return m;
  }

  double signal_occupation(const State& x) const {
    const Eigen::ArrayXd p = weight.array() * view(x).array().abs2();
    return (p * number[signal].array()).sum() / p.sum();
  }
};

struct Rhs {
  const Engine* engine;
  void operator()(const State& x, State& dxdt, double /*t*/) const {
    dxdt.resize(x.size());
    view(dxdt).noalias() = engine->generator * view(x);
  }
};

class Trajectory {
public:
  Trajectory(const Engine& engine, const TrajectoryConfig& cfg, std::size_t index)
      : engine_(engine),
        index_(index),
        rng_(cfg.seed ^ static_cast<std::uint64_t>(index)),
        stepper_(odeint::make_dense_output(cfg.abs_tol, cfg.rel_tol, Stepper())),
        psi_(engine.dim, cplx{}),
        scratch_(engine.dim) {
    psi_[0] = 1.0;
    threshold_ = draw_threshold();
  }

  double time() const { return time_; }
  const State& state() const { return psi_; }
  std::size_t jumps() const { return jumps_; }

  // Integrates to t_end, calling on_sample(k, state) for every samples[k]
  // in (time(), t_end] plus those equal to time(). samples must be sorted.
  template <class OnSample>
  void advance(double t_end, const std::vector<double>& samples, OnSample&& on_sample) {
    std::size_t k = 0;
    while (k < samples.size() && samples[k] <= time_) on_sample(k++, psi_);
    try {
      while (time_ < t_end) {
        if (!initialized_) {
          stepper_.initialize(psi_, time_, dt_);
          initialized_ = true;
        }
        const auto [t0, t1] = stepper_.do_step(Rhs{&engine_});
        const double n1 = engine_.norm2(view(stepper_.current_state()));
        if (!std::isfinite(n1)) fail("non-finite state norm", t1);

        double stop = std::min(t1, t_end);
        bool jump = false;
        if (n1 <= threshold_) {
          const double tj = locate_jump(t0, t1);
          if (tj <= t_end) {
            stop = tj;
            jump = true;
          }
        }
        while (k < samples.size() && samples[k] <= stop) {
          stepper_.calc_state(samples[k], scratch_);
          on_sample(k++, scratch_);
        }
        if (jump) {
          stepper_.calc_state(stop, psi_);
          apply_jump();
          time_ = stop;
          dt_ = stepper_.current_time_step();
          initialized_ = false;
        } else if (t1 >= t_end) {
          stepper_.calc_state(t_end, psi_);
          time_ = t_end;
          dt_ = stepper_.current_time_step();
          initialized_ = false;
        } else {
          time_ = t1;
        }
      }
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      fail(e.what(), time_);
    }
    while (k < samples.size() && samples[k] <= t_end + kJumpTimeTolerance) on_sample(k++, psi_);
  }

  // Replaces the state by a_s|psi>, normalized. Returns false if a_s
  // annihilates the state.
  bool annihilate_signal() {
    State phi(engine_.dim);
    view(phi).noalias() = engine_.annihilate_signal * view(psi_);
    const double n_phi = engine_.norm2(view(phi));
    const double n_psi = engine_.norm2(view(psi_));
    if (!(std::sqrt(n_phi / n_psi) >= kAnnihilationFloor)) return false;
    view(phi) /= std::sqrt(n_phi);
    psi_ = std::move(phi);
    threshold_ = draw_threshold();
    initialized_ = false;
    return true;
  }

private:
  [[noreturn]] void fail(const std::string& what, double t) const {
    std::ostringstream os;
    os << "integrator failure in trajectory " << index_ << " at t = " << t << ": " << what;
    throw IntegratorError(kModule, os.str(), index_, t);
  }

  double draw_threshold() {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double r = 0.0;
    while (r <= 0.0) r = u(rng_);
    return r;
  }

  double locate_jump(double lo, double hi) {
    while (hi - lo > kJumpTimeTolerance) {
      const double mid = 0.5 * (lo + hi);
      stepper_.calc_state(mid, scratch_);
      if (engine_.norm2(view(scratch_)) > threshold_) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return hi;
  }

  void apply_jump() {
    const auto psi = view(psi_);
    const std::size_t nc = engine_.channels.size();
    std::vector<Eigen::VectorXcd> out(nc);
    std::vector<double> weight(nc);
    double total = 0.0;
    for (std::size_t c = 0; c < nc; ++c) {
      out[c] = engine_.channels[c] * psi + engine_.beta * psi;
      weight[c] = engine_.norm2(out[c]);
      total += weight[c];
    }
    if (nc == 0 || !(total > 0.0)) fail("jump with vanishing rate", time_);
    std::uniform_real_distribution<double> u(0.0, total);
    const double pick = u(rng_);
    std::size_t c = 0;
    for (double acc = weight[0]; c + 1 < nc && pick >= acc; acc += weight[++c]) {
    }
    view(psi_) = out[c] / std::sqrt(weight[c]);
    threshold_ = draw_threshold();
    ++jumps_;
  }

  const Engine& engine_;
  std::size_t index_;
  std::mt19937_64 rng_;
  DenseStepper stepper_;
  State psi_;
  State scratch_;
  double time_ = 0.0;
  double dt_ = 1e-2;
  double threshold_ = 0.0;
  bool initialized_ = false;
  std::size_t jumps_ = 0;
};

struct TrajectoryResult {
  std::vector<double> occupation;  // time average per site
  double pair = 0.0;
  std::vector<double> numerator;   // g2(tau) numerator per tau
  std::size_t jumps = 0;
  std::size_t resampled = 0;
  std::vector<Sample> samples;
};

std::vector<double> record_times(const TrajectoryConfig& cfg) {
  const auto count = static_cast<std::size_t>(std::floor(cfg.t_record / cfg.sample_interval * (1.0 + 1e-12)));
  std::vector<double> t(count + 1);
  for (std::size_t k = 0; k <= count; ++k) t[k] = cfg.t_relax + static_cast<double>(k) * cfg.sample_interval;
  return t;
}

TrajectoryStats run_ensemble(const LatticeSpec& spec, const FockSpec& fock, const TrajectoryConfig& cfg,
                             const std::vector<double>* tau_grid, const SampleSink& sink) {
  spec.validate();
  cfg.validate();
  if (tau_grid) {
    if (tau_grid->empty()) throw ValidationError(kModule, "tau grid is empty");
    for (std::size_t k = 0; k < tau_grid->size(); ++k) {
      if (!((*tau_grid)[k] >= 0.0) || (k > 0 && (*tau_grid)[k] <= (*tau_grid)[k - 1])) {
        throw ValidationError(kModule, "tau grid must be non-negative and strictly increasing");
      }
    }
  }
  const Engine engine(spec, fock, cfg);
  const std::vector<double> times = record_times(cfg);
  const double t_end = cfg.t_relax + cfg.t_record;
  std::vector<TrajectoryResult> results(cfg.n_traj);

  parallel_for(cfg.n_traj, [&](std::size_t i) {
    TrajectoryResult& res = results[i];
    Trajectory traj(engine, cfg, i);
    traj.advance(cfg.t_relax, {}, [](std::size_t, const State&) {});

    res.occupation.assign(engine.n_sites, 0.0);
    traj.advance(t_end, times, [&](std::size_t k, const State& x) {
      const Engine::Moments m = engine.moments(x);
      for (std::size_t j = 0; j < engine.n_sites; ++j) res.occupation[j] += m.occupation[j];
      res.pair += m.pair;
      if (sink) res.samples.push_back({i, times[k], m.occupation[engine.signal], m.pair});
    });
    const auto n = static_cast<double>(times.size());
    for (double& v : res.occupation) v /= n;
    res.pair /= n;

    if (tau_grid) {
      double n0 = engine.signal_occupation(traj.state());
      while (!traj.annihilate_signal()) {
        if (++res.resampled > kMaxResamples) {
          throw UndefinedCorrelationError(kModule, "signal mode stays empty; g2(tau) undefined");
        }
        traj.advance(traj.time() + cfg.sample_interval, {}, [](std::size_t, const State&) {});
        n0 = engine.signal_occupation(traj.state());
      }
      const double t0 = traj.time();
      std::vector<double> at(tau_grid->size());
      for (std::size_t k = 0; k < at.size(); ++k) at[k] = t0 + (*tau_grid)[k];
      res.numerator.assign(at.size(), 0.0);
      traj.advance(at.back(), at, [&](std::size_t k, const State& x) {
        res.numerator[k] = engine.signal_occupation(x) * n0;
      });
    }
    res.jumps = traj.jumps();
  });

  if (sink) {
    for (const auto& r : results) {
      for (const auto& s : r.samples) sink(s);
    }
  }

  TrajectoryStats stats;
  stats.signal_site = engine.signal;
  std::vector<double> column(cfg.n_traj);
  for (std::size_t j = 0; j < engine.n_sites; ++j) {
    for (std::size_t i = 0; i < cfg.n_traj; ++i) column[i] = results[i].occupation[j];
    stats.occupations.push_back(jackknife(column));
  }
  for (const auto& r : results) {
    stats.trajectory_occupation.push_back(r.occupation[engine.signal]);
    stats.trajectory_pair.push_back(r.pair);
    stats.jump_count.push_back(r.jumps);
    stats.resampled += r.resampled;
  }
  stats.pair_correlation = jackknife(stats.trajectory_pair);
  const bool defined = stats.occupations[engine.signal].mean > 0.0;
  if (defined) stats.g2_zero = jackknife_g2(stats.trajectory_pair, stats.trajectory_occupation);
  if (tau_grid) {
    if (!defined) throw UndefinedCorrelationError(kModule, "g2(tau) undefined: zero mean occupation");
    stats.tau = *tau_grid;
    for (std::size_t k = 0; k < tau_grid->size(); ++k) {
      for (std::size_t i = 0; i < cfg.n_traj; ++i) column[i] = results[i].numerator[k];
      stats.g2_tau.push_back(jackknife_g2(column, stats.trajectory_occupation));
    }
  }
  return stats;
}

}  // namespace

QuantumState QuantumState::vacuum(const FockBasis& basis) {
  QuantumState s;
  s.amplitudes = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis.dimension()));
  s.amplitudes(0) = 1.0;
  s.norm = 1.0;
  return s;
}

void TrajectoryConfig::validate() const {
  if (!(t_relax > 0.0) || !(t_record > 0.0) || !(sample_interval > 0.0)) {
    throw ValidationError(kModule, "t_relax, t_record and sample_interval must be > 0");
  }
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw ValidationError(kModule, "integrator tolerances must be > 0");
  if (n_traj < 2) throw ValidationError(kModule, "n_traj must be >= 2 for jackknife errors");
  if (!std::isfinite(beta)) throw ValidationError(kModule, "beta must be finite");
}

std::size_t TrajectoryConfig::signal(std::size_t n_sites) const {
  const std::size_t s = signal_site.value_or(n_sites >= 2 ? n_sites - 2 : 0);
  if (s >= n_sites) throw ValidationError(kModule, "signal site out of range");
  return s;
}

std::size_t TrajectoryStats::total_jumps() const {
  std::size_t n = 0;
  for (auto j : jump_count) n += j;
  return n;
}

const Estimate& TrajectoryStats::g2() const {
  if (!g2_zero) throw UndefinedCorrelationError(kModule, "g2 undefined: zero mean occupation on signal site");
  return *g2_zero;
}

TrajectoryStats wfmc_run(const LatticeSpec& spec, const FockSpec& fock, const TrajectoryConfig& cfg,
                         const SampleSink& sink) {
  return run_ensemble(spec, fock, cfg, nullptr, sink);
}

TrajectoryStats g2_tau(const LatticeSpec& spec, const FockSpec& fock, const TrajectoryConfig& cfg,
                       const std::vector<double>& tau_grid, const SampleSink& sink) {
  return run_ensemble(spec, fock, cfg, &tau_grid, sink);
}

}  // namespace upb::master
