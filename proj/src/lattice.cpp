#include "upb/lattice.hpp"

#include <cmath>
#include <sstream>

#include "upb/error.hpp"
#include "upb/log.hpp"

namespace upb {
namespace {

const char* kModule = "lattice";

}  // namespace

void LatticeSpec::validate() const {
  if (n_sites < 2 || n_sites % 2 != 0) {
    throw ValidationError(kModule, "n_sites must be even");
  }
  if (!std::isfinite(intercell) || !std::isfinite(onsite_energy) || !std::isfinite(kerr)) {
    throw ValidationError(kModule, "lattice parameters must be finite");
  }
  if (!(loss >= 0.0) || !std::isfinite(loss)) {
    throw ValidationError(kModule, "loss must be >= 0");
  }
  if (!(dephasing >= 0.0) || !std::isfinite(dephasing)) {
    throw ValidationError(kModule, "dephasing must be >= 0");
  }
  if (drive.size() != n_sites) {
    std::ostringstream os;
    os << "drive has " << drive.size() << " entries, expected n_sites = " << n_sites;
    throw ValidationError(kModule, os.str());
  }
}

LatticeSpec LatticeSpec::driven_first_site(std::size_t n_sites, double intercell, double energy,
                                           double loss, double kerr, double f1,
                                           double dephasing) {
  LatticeSpec spec;
  spec.n_sites = n_sites;
  spec.intercell = intercell;
  spec.onsite_energy = energy;
  spec.loss = loss;
  spec.kerr = kerr;
  spec.dephasing = dephasing;
  spec.drive.assign(n_sites, cplx{});
  if (n_sites > 0) spec.drive[0] = f1;
  return spec;
}

ChiralOperator::ChiralOperator(std::size_t n_sites) : signs_(n_sites) {
  for (std::size_t j = 0; j < n_sites; ++j) signs_[j] = (j % 2 == 0) ? 1 : -1;
}

Eigen::MatrixXd ChiralOperator::matrix() const {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(signs_.size(), signs_.size());
  for (std::size_t j = 0; j < signs_.size(); ++j) g(j, j) = signs_[j];
  return g;
}

bool ChiralOperator::anticommutes_with(const Eigen::MatrixXd& h) const {
  const auto n = static_cast<Eigen::Index>(signs_.size());
  if (h.rows() != n || h.cols() != n) return false;
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      const double conj = signs_[r] * signs_[c] * h(r, c);
      if (conj != -h(r, c)) return false;
    }
  }
  return true;
}

bool ChiralOperator::is_involution() const {
  for (int s : signs_) {
    if (s * s != 1) return false;
  }
  return true;
}

Eigen::MatrixXd build_hamiltonian(const LatticeSpec& spec) {
  if (spec.n_sites < 2 || spec.n_sites % 2 != 0) {
    throw ValidationError(kModule, "n_sites must be even");
  }
  const auto n = static_cast<Eigen::Index>(spec.n_sites);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j + 1 < n; ++j) {
    const double hop = (j % 2 == 0) ? 1.0 : spec.intercell;
    h(j, j + 1) = hop;
    h(j + 1, j) = hop;
  }
  return h;
}

SingleParticleSpectrum eigendecompose(const Eigen::MatrixXd& hamiltonian) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hamiltonian);
  if (solver.info() != Eigen::Success) {
    throw Error(kModule, "eigensolver failed to converge");
  }
  SingleParticleSpectrum out{solver.eigenvalues(), solver.eigenvectors()};
  const double scale = 1e-10;
  for (Eigen::Index c = 0; c < out.eigenvectors.cols(); ++c) {
    auto col = out.eigenvectors.col(c);
    for (Eigen::Index r = 0; r < col.size(); ++r) {
      if (std::abs(col(r)) > scale) {
        if (col(r) < 0.0) col = -col;
        break;
      }
    }
  }
  return out;
}

namespace {

void check_poles(const SingleParticleSpectrum& spectrum, cplx z) {
  for (Eigen::Index n = 0; n < spectrum.eigenvalues.size(); ++n) {
    const double eps = spectrum.eigenvalues(n);
    if (std::abs(z + eps) < kPoleTolerance) {
      std::ostringstream os;
      os << "z = " << z << " is within " << kPoleTolerance << " of the pole at -eps_n, eps_n = "
         << eps;
      throw PoleError(kModule, os.str(), eps);
    }
  }
}

}  // namespace

cplx green_element(const SingleParticleSpectrum& spectrum, cplx z, std::size_t i, std::size_t j) {
  const auto n = spectrum.size();
  if (i >= n || j >= n) throw ValidationError(kModule, "site index out of range");
  check_poles(spectrum, z);
  cplx sum{};
  for (Eigen::Index m = 0; m < spectrum.eigenvalues.size(); ++m) {
    sum += spectrum.eigenvectors(i, m) * spectrum.eigenvectors(j, m) /
           (z + spectrum.eigenvalues(m));
  }
  return sum;
}

Eigen::MatrixXcd green_matrix(const SingleParticleSpectrum& spectrum, cplx z) {
  check_poles(spectrum, z);
  const Eigen::MatrixXcd phi = spectrum.eigenvectors.cast<cplx>();
  Eigen::VectorXcd inv(spectrum.eigenvalues.size());
  for (Eigen::Index m = 0; m < inv.size(); ++m) inv(m) = 1.0 / (z + spectrum.eigenvalues(m));
  return phi * inv.asDiagonal() * phi.transpose();
}

double gc_power_element(const Eigen::MatrixXd& hamiltonian, unsigned m, std::size_t i,
                        std::size_t j) {
  const auto n = static_cast<std::size_t>(hamiltonian.rows());
  if (m == 0) throw ValidationError(kModule, "power m must be positive");
  if (i >= n || j >= n) throw ValidationError(kModule, "site index out of range");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(hamiltonian);
  if (!lu.isInvertible()) throw SingularMatrixError(kModule, "hopping matrix is singular");
  Eigen::VectorXd x = Eigen::VectorXd::Unit(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(j));
  for (unsigned k = 0; k < m; ++k) x = lu.solve(x);
  return x(static_cast<Eigen::Index>(i));
}

}  // namespace upb
