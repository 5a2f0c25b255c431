// Acceptance checks. Run with one criterion id (AC1 ... AC8) or "all".
// Prints one PASS/FAIL line per check and exits non-zero on any failure.

#include <cstdarg>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "upb/analytics.hpp"
#include "upb/error.hpp"
#include "upb/lattice.hpp"
#include "upb/master.hpp"
#include "upb/sweep.hpp"
#include "upb/weakdrive.hpp"

using namespace upb;

namespace {

class Report {
public:
  explicit Report(std::string id) : id_(std::move(id)) {}

  void check(bool ok, const std::string& label) { emit(ok, label, ""); }

  void check(bool ok, const std::string& label, const char* fmt, ...) __attribute__((format(printf, 4, 5))) {
    char buf[512];
    va_list ap;
    va_start(ap, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, ap);
    va_end(ap);
    emit(ok, label, buf);
  }

  bool passed() const { return all_; }

private:
  void emit(bool ok, const std::string& label, const char* buf) {
    std::printf("%s %s %s%s%s\n", id_.c_str(), ok ? "PASS" : "FAIL", label.c_str(), buf[0] ? ": " : "", buf);
    std::fflush(stdout);
    all_ &= ok;
  }

  std::string id_;
  bool all_ = true;
};

LatticeSpec at_optimum(std::size_t n, double gamma, double f1, double kappa_over_alpha = 0.0) {
  const auto opt = analytics::optimal_point(n, gamma);
  return LatticeSpec::driven_first_site(n, 0.1, opt.energy, gamma, opt.alpha, f1, kappa_over_alpha * opt.alpha);
}

double weakdrive_g2(const LatticeSpec& s) {
  const auto sol = weakdrive::solve(s, weakdrive::Method::exact);
  return weakdrive::g2_zero_delay(sol, weakdrive::default_signal_site(s.n_sites));
}

master::TrajectoryConfig trajectories(double t_relax, double t_record, std::size_t n_traj, std::uint64_t seed = 1) {
  master::TrajectoryConfig c;
  c.t_relax = t_relax;
  c.t_record = t_record;
  c.n_traj = n_traj;
  c.seed = seed;
  return c;
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::abs(b); }

bool ac1() {
  Report r("AC1");
  for (double gamma : {0.3, 0.4, 0.5}) {
    double previous = 0.0;
    for (std::size_t n : {2u, 4u, 6u, 8u}) {
      const double closed = analytics::optimal_point(n, gamma).alpha;
      double scanned = NAN;
      try {
        scanned = sweep::optimal_alpha_scan(n, 0.1, gamma, closed / 10.0, closed * 10.0);
      } catch (const Error& e) {
        r.check(false, "scan N=" + std::to_string(n), "gamma=%g %s", gamma, e.what());
        continue;
      }
      const double d = rel_diff(scanned, closed);
      r.check(d <= 0.15, "scan vs closed form N=" + std::to_string(n), "gamma=%g alpha_scan=%.6g alpha_closed=%.6g rel=%.4f tol=0.15",
              gamma, scanned, closed, d);
      if (n > 2) {
        const double ratio = scanned / previous;
        r.check(ratio < 0.25, "ratio alpha(" + std::to_string(n) + ")/alpha(" + std::to_string(n - 2) + ")",
                "gamma=%g ratio=%.4f tol<0.25", gamma, ratio);
      }
      previous = scanned;
    }
  }
  return r.passed();
}

bool ac2() {
  Report r("AC2");
  const std::vector<std::pair<std::size_t, double>> sets{{2, 1e-2}, {4, 2e-3}, {6, 2e-4}, {8, 2e-5}};
  for (const auto& [n, alpha] : sets) {
    sweep::GridSpec g;
    g.fixed = LatticeSpec::driven_first_site(n, 0.1, 0.0, 0.3, alpha, 1.0);
    const auto start = std::chrono::steady_clock::now();
    sweep::ZMap map = sweep::z_grid_map(g);
    map.singularities = sweep::find_phase_singularities(map);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    // |alpha| = (1/4) (N-2)!!/(N-3)!! (2|z|)^(N+1) on the predicted circle.
    double ratio = 1.0;
    for (int k = static_cast<int>(n) - 2; k > 1; k -= 2) ratio *= k;
    for (int k = static_cast<int>(n) - 3; k > 1; k -= 2) ratio /= k;
    const double radius = 0.5 * std::pow(4.0 * alpha / ratio, 1.0 / static_cast<double>(n + 1));
    const double cell = std::max(g.energy.step(), 0.5 * g.gamma.step());
    bool unit = !map.singularities.empty();
    double best = INFINITY;
    for (const auto& s : map.singularities) {
      unit = unit && std::abs(s.winding) == 1;
      best = std::min(best, std::abs(std::abs(s.z) - radius));
    }
    const std::string tag = "N=" + std::to_string(n);
    r.check(unit, "windings are +-1 " + tag, "count=%zu", map.singularities.size());
    r.check(best <= 2.0 * cell, "singularity near predicted radius " + tag,
            "radius=%.5f nearest_offset=%.5f tol=%.5f (2 cells)", radius, best, 2.0 * cell);
    r.check(seconds < 60.0, "map time " + tag, "%.2f s at %zux%zu tol<60", seconds, g.energy.count, g.gamma.count);
  }
  return r.passed();
}

void wfmc_vs_weakdrive(Report& r, std::size_t n, const master::FockSpec& fock, const master::TrajectoryConfig& cfg) {
  const LatticeSpec s = at_optimum(n, 0.3, 1e-4);
  const double wd = weakdrive_g2(s);
  const auto start = std::chrono::steady_clock::now();
  const auto st = master::wfmc_run(s, fock, cfg);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const auto g2 = st.g2();
  const double k = std::abs(g2.mean - wd) / g2.error;
  const std::string tag = "N=" + std::to_string(n);
  r.check(k <= 3.0, "WFMC vs weak drive " + tag, "wfmc=%.8g+-%.2g weakdrive=%.8g dev=%.2f sigma tol=3 (%.1f s)", g2.mean,
          g2.error, wd, k, seconds);
  r.check(g2.mean < 0.1 && wd < 0.1, "antibunched " + tag, "wfmc=%.4g weakdrive=%.4g tol<0.1", g2.mean, wd);
}

bool ac3() {
  Report r("AC3");
  wfmc_vs_weakdrive(r, 2, master::FockSpec::uniform(2, 3), trajectories(1000.0, 10000.0, 10));
  wfmc_vs_weakdrive(r, 4, master::FockSpec::uniform(4, 3), trajectories(200.0, 4000.0, 10));
  // Two photons per site carry every term of g2 at weak drive.
  wfmc_vs_weakdrive(r, 6, master::FockSpec::uniform(6, 2), trajectories(200.0, 1000.0, 6));
  return r.passed();
}

bool ac4() {
  Report r("AC4");
  const LatticeSpec s = at_optimum(2, 0.3, 1e-4);
  const auto fock = master::FockSpec::uniform(2, 3);
  const std::size_t site = weakdrive::default_signal_site(2);
  const double rho = master::liouvillian_steady_state(s, fock).g2(site);
  const auto g2 = master::wfmc_run(s, fock, trajectories(1000.0, 10000.0, 10)).g2();
  const double wd = weakdrive_g2(s);
  const double k = std::abs(g2.mean - rho) / g2.error;
  r.check(k <= 3.0, "Liouvillian vs WFMC", "liouvillian=%.8g wfmc=%.8g+-%.2g dev=%.2f sigma tol=3", rho, g2.mean, g2.error, k);
  const double d = rel_diff(rho, wd);
  r.check(d <= 0.05, "Liouvillian vs weak drive", "liouvillian=%.8g weakdrive=%.8g rel=%.2e tol=0.05", rho, wd, d);
  return r.passed();
}

bool ac5() {
  Report r("AC5");
  const double reference = weakdrive_g2(at_optimum(2, 0.3, 1.0));
  double worst = 0.0;
  for (double f1 = 1.0; f1 >= 1e-12; f1 /= 10.0) worst = std::max(worst, rel_diff(weakdrive_g2(at_optimum(2, 0.3, f1)), reference));
  r.check(worst <= 1e-12, "weak drive invariant for F1 in [1e-12, 1]", "max rel=%.2e tol=1e-12", worst);

  const auto fock = master::FockSpec::uniform(2, 3);
  std::vector<std::pair<double, master::Estimate>> runs;
  for (double f1 : {1e-4, 1e-3, 1e-2}) {
    runs.emplace_back(f1, master::wfmc_run(at_optimum(2, 0.3, f1), fock, trajectories(1000.0, 10000.0, 10)).g2());
  }
  for (std::size_t i = 0; i < runs.size(); ++i) {
    for (std::size_t j = i + 1; j < runs.size(); ++j) {
      const auto& [fa, a] = runs[i];
      const auto& [fb, b] = runs[j];
      const double gap = std::abs(a.mean - b.mean);
      r.check(gap <= a.error + b.error, "WFMC error bars overlap",
              "F1=%g: %.8g+-%.2g F1=%g: %.8g+-%.2g |diff|=%.2g", fa, a.mean, a.error, fb, b.mean, b.error, gap);
    }
  }
  return r.passed();
}

bool ac6() {
  Report r("AC6");
  const auto fock = master::FockSpec::uniform(2, 3);
  const auto cfg = trajectories(1000.0, 10000.0, 10);
  const auto weak = master::wfmc_run(at_optimum(2, 0.3, 1e-4, 1e-3), fock, cfg).g2();
  const auto strong = master::wfmc_run(at_optimum(2, 0.3, 1e-4, 1.0), fock, cfg).g2();
  const double lower = (strong.mean - strong.error) / (weak.mean + weak.error);
  r.check(lower >= 5.0, "dephasing kappa=alpha vs kappa=1e-3 alpha",
          "g2=%.6g+-%.2g vs %.6g+-%.2g, worst-case factor=%.2f tol>=5", strong.mean, strong.error, weak.mean, weak.error, lower);
  return r.passed();
}

bool ac7() {
  Report r("AC7");
  const double gamma = 0.3;
  const LatticeSpec s = at_optimum(2, gamma, 1e-4);
  const std::size_t count = 201;
  const double tau_max = 20.0 / gamma;
  std::vector<double> tau(count);
  for (std::size_t k = 0; k < count; ++k) tau[k] = tau_max * static_cast<double>(k) / static_cast<double>(count - 1);
  const auto st = master::g2_tau(s, master::FockSpec::uniform(2, 3), trajectories(1000.0, 10000.0, 10), tau);
  const auto& g = st.g2_tau;

  r.check(g[0].mean < g[1].mean, "g2(0) is a local minimum", "g2(0)=%.5g g2(%.3g)=%.5g", g[0].mean, tau[1], g[1].mean);
  std::size_t above = 0;
  while (above < count && !(g[above].mean > 1.0)) ++above;
  std::size_t below = above;
  while (below < count && !(g[below].mean < 1.0)) ++below;
  if (above == count) {
    r.check(false, "oscillates above then below 1", "never above 1");
  } else {
    r.check(below < count, "oscillates above then below 1", "first above at tau=%.4g (g2=%.5g), next below at tau=%.4g",
            tau[above], g[above].mean, below < count ? tau[below] : NAN);
  }
  const auto& last = g.back();
  r.check(std::abs(last.mean - 1.0) <= last.error, "g2(20/gamma) = 1 within error bar",
          "g2(%.4g)=%.6g+-%.2g resampled=%zu", tau.back(), last.mean, last.error, st.resampled);
  return r.passed();
}

bool ac8() {
  Report r("AC8");
  // Right-hand side (-1)^(N/2+1) (N-3)!!/(N-2)!! built here from plain products.
  bool gsum = true;
  for (int n = 2; n <= 20; n += 2) {
    analytics::Rational expected(1);
    for (int k = n - 3; k > 1; k -= 2) expected *= k;
    for (int k = n - 2; k > 1; k -= 2) expected /= k;
    if ((n / 2 + 1) % 2 == 1) expected = -expected;
    try {
      gsum = analytics::gsum_identity(n) == expected && analytics::g_sum(n, n - 2) == expected && gsum;
    } catch (const ConsistencyError&) {
      gsum = false;
    }
  }
  r.check(gsum, "gsum identity, even N <= 20, rational arithmetic");

  double fact = 0.0, pairing = 0.0, fd = 0.0;
  for (std::size_t n : {2u, 4u, 6u, 8u}) {
    const LatticeSpec s0 = LatticeSpec::driven_first_site(n, 0.1, 0.07, 0.3, 0.0, 1.0);
    const auto sol = weakdrive::solve(s0, weakdrive::Method::exact);
    const Eigen::VectorXcd p = sol.one_photon.amplitudes;
    const Eigen::MatrixXcd outer = p * p.transpose() / std::sqrt(2.0);
    fact = std::max(fact, (sol.two_photon.amplitudes - outer).norm() / outer.norm());

    const auto sp = eigendecompose(build_hamiltonian(s0));
    const Eigen::MatrixXd gamma = ChiralOperator(n).matrix();
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t m = n - 1 - k;
      pairing = std::max(pairing, std::abs(sp.eigenvalues(k) + sp.eigenvalues(m)));
      const Eigen::VectorXd mapped = gamma * sp.eigenvectors.col(k);
      const double overlap = std::abs(mapped.dot(sp.eigenvectors.col(m)));
      pairing = std::max(pairing, std::abs(overlap - 1.0));
    }

    LatticeSpec s1 = s0;
    const double h = 1e-6;
    s1.kerr = h;
    LatticeSpec sm = s0;
    sm.kerr = -h;
    const Eigen::MatrixXcd d = (weakdrive::solve(s1, weakdrive::Method::exact).two_photon.amplitudes -
                                weakdrive::solve(sm, weakdrive::Method::exact).two_photon.amplitudes) / (2.0 * h);
    const auto parts = weakdrive::perturbative_parts(s0, sp);
    fd = std::max(fd, (d - parts.correction.amplitudes).norm() / parts.correction.amplitudes.norm());
  }
  r.check(fact <= 1e-12, "linear limit psi2_0 = psi1 (x) psi1 / sqrt(2)", "max rel=%.2e tol=1e-12", fact);
  r.check(pairing <= 1e-12, "chiral pairing of eigenvalues and eigenvectors", "max dev=%.2e tol=1e-12", pairing);
  r.check(fd <= 1e-4, "finite-difference d psi2 / d alpha = psi2_1", "max rel=%.2e tol=1e-4", fd);
  return r.passed();
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<std::string, std::function<bool()>> criteria{{"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4},
                                                             {"AC5", ac5}, {"AC6", ac6}, {"AC7", ac7}, {"AC8", ac8}};
  const std::string which = argc > 1 ? argv[1] : "all";
  bool ok = true;
  bool ran = false;
  for (const auto& [id, fn] : criteria) {
    if (which != "all" && which != id) continue;
    ran = true;
    try {
      ok = fn() && ok;
    } catch (const std::exception& e) {
      std::printf("%s FAIL exception: %s\n", id.c_str(), e.what());
      ok = false;
    }
  }
  if (!ran) {
    std::fprintf(stderr, "unknown criterion %s\n", which.c_str());
    return 2;
  }
  return ok ? 0 : 1;
}
