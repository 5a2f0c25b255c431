#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace upb {

using cplx = std::complex<double>;

/// Physical parameters of a driven-dissipative dimer chain.
///
/// Sites are indexed from 0 in code. The intracell coupling (bond between
/// sites 2k and 2k+1) is the energy unit; `intercell` couples 2k+1 and 2k+2.
/// Every resonator shares `onsite_energy`, `loss`, `kerr` and `dephasing`.
struct LatticeSpec {
  std::size_t n_sites = 2;
  double intercell = 0.1;
  double onsite_energy = 0.0;
  double loss = 0.0;
  double kerr = 0.0;
  double dephasing = 0.0;
  std::vector<cplx> drive;  // length n_sites; coherent amplitude per site

  /// Complex energy E - i*loss/2 that absorbs the decay into the resonance.
  cplx z() const { return {onsite_energy, -0.5 * loss}; }

  /// Throws ValidationError if an invariant is broken.
  void validate() const;

  /// Chain with only site 0 driven at amplitude `f1`.
  static LatticeSpec driven_first_site(std::size_t n_sites, double intercell, double energy,
                                       double loss, double kerr, double f1,
                                       double dephasing = 0.0);
};

/// Eigen-decomposition of the single-photon hopping matrix. Eigenvalues are
/// ascending; each eigenvector column has its first non-negligible entry
/// positive.
struct SingleParticleSpectrum {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;

  std::size_t size() const { return static_cast<std::size_t>(eigenvalues.size()); }
};

/// Sublattice sign operator diag(+1, -1, +1, ...). Anticommutes with the
/// hopping matrix of any bipartite chain.
class ChiralOperator {
public:
  explicit ChiralOperator(std::size_t n_sites);

  const std::vector<int>& signs() const { return signs_; }
  Eigen::MatrixXd matrix() const;

  /// Exact check of Gamma * H * Gamma == -H, comparing entries bitwise
  /// (sign flips are exact in floating point).
  bool anticommutes_with(const Eigen::MatrixXd& hamiltonian) const;
  /// Gamma^2 == identity.
  bool is_involution() const;

private:
  std::vector<int> signs_;
};

/// Tridiagonal hopping matrix with bonds 1, t, 1, t, ... and zero diagonal.
Eigen::MatrixXd build_hamiltonian(const LatticeSpec& spec);

SingleParticleSpectrum eigendecompose(const Eigen::MatrixXd& hamiltonian);

/// <i| (z + H)^{-1} |j> evaluated as a sum over eigenmodes. Throws PoleError
/// when |z + eps_n| < kPoleTolerance for some mode.
cplx green_element(const SingleParticleSpectrum& spectrum, cplx z, std::size_t i, std::size_t j);

/// Full resolvent (z + H)^{-1} in the site basis.
Eigen::MatrixXcd green_matrix(const SingleParticleSpectrum& spectrum, cplx z);

/// <i| H^{-m} |j> from m successive linear solves.
double gc_power_element(const Eigen::MatrixXd& hamiltonian, unsigned m, std::size_t i,
                        std::size_t j);

inline constexpr double kPoleTolerance = 1e-12;

}  // namespace upb
