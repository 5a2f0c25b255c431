#include "upb/weakdrive.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "upb/error.hpp"
#include "upb/log.hpp"

namespace upb::weakdrive {
namespace {

const char* kModule = "weakdrive";
const double kSqrt2 = std::sqrt(2.0);

Eigen::VectorXcd drive_vector(const LatticeSpec& spec) {
  Eigen::VectorXcd f(spec.n_sites);
  for (std::size_t j = 0; j < spec.n_sites; ++j) f(j) = spec.drive[j];
  return f;
}

void check_one_photon_poles(const SingleParticleSpectrum& spectrum, cplx z) {
  for (Eigen::Index n = 0; n < spectrum.eigenvalues.size(); ++n) {
    if (std::abs(z + spectrum.eigenvalues(n)) < kPoleTolerance) {
      std::ostringstream os;
      os << "one-photon pole: z = " << z << ", eps_n = " << spectrum.eigenvalues(n);
      throw PoleError(kModule, os.str(), spectrum.eigenvalues(n));
    }
  }
}

// Index of the symmetrized pair (i <= j) in row-major upper-triangular order.
class PairIndex {
public:
  explicit PairIndex(std::size_t n) : n_(n) {}
  std::size_t size() const { return n_ * (n_ + 1) / 2; }
  std::size_t operator()(std::size_t i, std::size_t j) const {
    if (i > j) std::swap(i, j);
    return i * n_ - i * (i - 1) / 2 + (j - i);
  }

private:
  std::size_t n_;
};

}  // namespace

const char* to_string(Method m) { return m == Method::exact ? "exact" : "perturbative"; }

Method method_from_string(const std::string& s) {
  if (s == "exact") return Method::exact;
  if (s == "perturbative") return Method::perturbative;
  throw ValidationError(kModule, "unknown method '" + s + "' (expected exact|perturbative)");
}

std::size_t default_signal_site(std::size_t n_sites) { return n_sites >= 2 ? n_sites - 2 : 0; }

OnePhotonState solve_one_photon(const LatticeSpec& spec) {
  spec.validate();
  const Eigen::MatrixXd h = build_hamiltonian(spec);
  check_one_photon_poles(eigendecompose(h), spec.z());
  Eigen::MatrixXcd m = h.cast<cplx>();
  m.diagonal().array() += spec.z();
  return {-m.partialPivLu().solve(drive_vector(spec))};
}

OnePhotonState solve_one_photon(const LatticeSpec& spec, const SingleParticleSpectrum& spectrum) {
  spec.validate();
  const cplx z = spec.z();
  check_one_photon_poles(spectrum, z);
  const Eigen::MatrixXcd phi = spectrum.eigenvectors.cast<cplx>();
  Eigen::VectorXcd f = phi.transpose() * drive_vector(spec);
  for (Eigen::Index n = 0; n < f.size(); ++n) f(n) /= z + spectrum.eigenvalues(n);
  return {-(phi * f)};
}

TwoPhotonState solve_two_photon_exact(const LatticeSpec& spec, const OnePhotonState& psi1) {
  spec.validate();
  const std::size_t n = spec.n_sites;
  if (n > kDenseSiteLimit) {
    std::ostringstream os;
    os << "dense two-photon solve of dimension " << n * (n + 1) / 2 << " for " << n
       << " sites; cost grows as n^6";
    warn(kModule, os.str());
  }
  const Eigen::MatrixXd h = build_hamiltonian(spec);
  const cplx z = spec.z();
  const PairIndex idx(n);
  const auto dim = static_cast<Eigen::Index>(idx.size());

  // Fock basis: |i,j>_F = a_i^+ a_j^+ |0> for i < j, (a_i^+)^2/sqrt(2) |0> for i == j.
  Eigen::MatrixXcd h2 = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const auto col = static_cast<Eigen::Index>(idx(i, j));
      h2(col, col) += 2.0 * z + (i == j ? 2.0 * spec.kerr : 0.0);
      // Move one photon from site `from` to site m, the other staying at `stay`.
      auto hop = [&](std::size_t from, std::size_t stay, double weight) {
        for (std::size_t m = 0; m < n; ++m) {
          const double hm = h(m, from);
          if (hm == 0.0) continue;
          // a_m^+ a_stay^+ |0> in the Fock basis.
          const double norm = (m == stay) ? kSqrt2 : 1.0;
          h2(static_cast<Eigen::Index>(idx(m, stay)), col) += weight * hm * norm;
        }
      };
      if (i == j) {
        hop(i, i, kSqrt2);
      } else {
        hop(i, j, 1.0);
        hop(j, i, 1.0);
      }
    }
  }

  // Source H_+ psi1 = sum_{i,j} F_i psi1_j a_i^+ a_j^+ |0>.
  Eigen::VectorXcd source = Eigen::VectorXcd::Zero(dim);
  for (std::size_t i = 0; i < n; ++i) {
    if (spec.drive[i] == cplx{}) continue;
    for (std::size_t j = 0; j < n; ++j) {
      const double norm = (i == j) ? kSqrt2 : 1.0;
      source(static_cast<Eigen::Index>(idx(i, j))) += spec.drive[i] * psi1.amplitudes(j) * norm;
    }
  }

  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(h2);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-14)) {
    std::ostringstream os;
    os << "two-photon system is singular at z = " << z << " (rcond " << rcond << ")";
    throw PoleError(kModule, os.str(), std::numeric_limits<double>::quiet_NaN());
  }
  const Eigen::VectorXcd c = -lu.solve(source);

  TwoPhotonState out{Eigen::MatrixXcd::Zero(n, n)};
  for (std::size_t i = 0; i < n; ++i) {
    out.amplitudes(i, i) = c(static_cast<Eigen::Index>(idx(i, i)));
    for (std::size_t j = i + 1; j < n; ++j) {
      const cplx v = c(static_cast<Eigen::Index>(idx(i, j))) / kSqrt2;
      out.amplitudes(i, j) = v;
      out.amplitudes(j, i) = v;
    }
  }
  return out;
}

PerturbativeParts perturbative_parts(const LatticeSpec& spec, const SingleParticleSpectrum& spectrum) {
  spec.validate();
  const cplx z = spec.z();
  const auto n = static_cast<Eigen::Index>(spec.n_sites);
  const Eigen::VectorXd& eps = spectrum.eigenvalues;
  for (Eigen::Index m = 0; m < n; ++m) {
    for (Eigen::Index k = m; k < n; ++k) {
      if (std::abs(2.0 * z + eps(m) + eps(k)) < kPoleTolerance) {
        std::ostringstream os;
        os << "two-photon pole: 2z + eps_m + eps_n = 0 at z = " << z;
        throw PoleError(kModule, os.str(), eps(m) + eps(k));
      }
    }
  }
  // u = G1 F, so psi1 = -u and psi2_0 = u (x) u / sqrt(2).
  const Eigen::VectorXcd u = -solve_one_photon(spec, spectrum).amplitudes;
  const Eigen::MatrixXd& phi = spectrum.eigenvectors;

  PerturbativeParts parts;
  parts.linear.amplitudes = u * u.transpose() / kSqrt2;

  // correction = -sqrt(2) sum_i G0^(2) |i,i> u_i^2; in the eigenbasis
  // c_mn = -sqrt(2) sum_i phi_m(i) phi_n(i) u_i^2 / (2z + eps_m + eps_n).
  const Eigen::VectorXcd u2 = u.array().square();
  Eigen::MatrixXcd c = phi.transpose().cast<cplx>() * u2.asDiagonal() * phi.cast<cplx>();
  for (Eigen::Index m = 0; m < n; ++m) {
    for (Eigen::Index k = 0; k < n; ++k) c(m, k) *= -kSqrt2 / (2.0 * z + eps(m) + eps(k));
  }
  parts.correction.amplitudes = phi.cast<cplx>() * c * phi.transpose().cast<cplx>();
  // Exact symmetry; the transform above only guarantees it to rounding.
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const cplx v = 0.5 * (parts.correction.amplitudes(i, j) + parts.correction.amplitudes(j, i));
      parts.correction.amplitudes(i, j) = v;
      parts.correction.amplitudes(j, i) = v;
    }
  }
  return parts;
}

TwoPhotonState solve_two_photon_perturbative(const LatticeSpec& spec,
                                             const SingleParticleSpectrum& spectrum) {
  const PerturbativeParts parts = perturbative_parts(spec, spectrum);
  return {parts.linear.amplitudes + spec.kerr * parts.correction.amplitudes};
}

namespace {

double g2_from(const OnePhotonState& p1, const TwoPhotonState& p2, std::size_t s) {
  const double a1 = std::abs(p1.amplitudes(static_cast<Eigen::Index>(s)));
  const double scale = p1.amplitudes.norm();
  if (!(scale > 0.0) || a1 <= 1e-14 * scale) {
    std::ostringstream os;
    os << "one-photon amplitude vanishes on site " << s << "; g2 is undefined";
    throw UndefinedCorrelationError(kModule, os.str());
  }
  const double a2 = std::abs(p2.amplitudes(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)));
  // Ratio first: a1^4 underflows for very weak drives.
  const double r = a2 / (a1 * a1);
  return 2.0 * r * r;
}

}  // namespace

WeakDriveSolution solve(const LatticeSpec& spec, Method method) {
  spec.validate();
  return solve(spec, method, eigendecompose(build_hamiltonian(spec)));
}

WeakDriveSolution solve(const LatticeSpec& spec, Method method, const SingleParticleSpectrum& spectrum) {
  WeakDriveSolution sol;
  sol.method = method;
  if (method == Method::exact) {
    sol.one_photon = solve_one_photon(spec);
    sol.two_photon = solve_two_photon_exact(spec, sol.one_photon);
  } else {
    sol.one_photon = solve_one_photon(spec, spectrum);
    sol.two_photon = solve_two_photon_perturbative(spec, spectrum);
  }
  sol.g2_per_site.resize(static_cast<Eigen::Index>(spec.n_sites));
  for (std::size_t s = 0; s < spec.n_sites; ++s) {
    try {
      sol.g2_per_site(static_cast<Eigen::Index>(s)) = g2_from(sol.one_photon, sol.two_photon, s);
    } catch (const UndefinedCorrelationError&) {
      sol.g2_per_site(static_cast<Eigen::Index>(s)) = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return sol;
}

double g2_zero_delay(const WeakDriveSolution& sol, std::size_t site) {
  if (site >= static_cast<std::size_t>(sol.one_photon.amplitudes.size())) {
    throw ValidationError(kModule, "site index out of range");
  }
  return g2_from(sol.one_photon, sol.two_photon, site);
}

cplx signal_amplitude(const WeakDriveSolution& sol, std::size_t site) {
  if (site >= static_cast<std::size_t>(sol.two_photon.amplitudes.rows())) {
    throw ValidationError(kModule, "site index out of range");
  }
  const auto s = static_cast<Eigen::Index>(site);
  return sol.two_photon.amplitudes(s, s);
}

}  // namespace upb::weakdrive
