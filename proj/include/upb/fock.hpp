#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "upb/lattice.hpp"

namespace upb::master {

using SparseMatrix = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

/// Per-site photon-number cutoffs of the truncated Fock space.
struct FockSpec {
  std::vector<unsigned> cutoffs;
  double budget = 1e6;  // maximum tensor-product dimension

  static FockSpec uniform(std::size_t n_sites, unsigned cutoff = 3);
  /// prod (cutoff_j + 1), as a double so it cannot overflow.
  double dimension() const;
  void validate(std::size_t n_sites) const;
};

/// Tensor-product occupation-number basis. Site 0 is the slowest index.
class FockBasis {
public:
  explicit FockBasis(const FockSpec& spec);

  std::size_t dimension() const { return dim_; }
  std::size_t n_sites() const { return cutoffs_.size(); }
  const std::vector<unsigned>& cutoffs() const { return cutoffs_; }

  unsigned occupation(std::size_t state, std::size_t site) const {
    return occ_[state * cutoffs_.size() + site];
  }
  unsigned total_photons(std::size_t state) const { return total_[state]; }
  std::size_t stride(std::size_t site) const { return strides_[site]; }
  std::size_t index(const std::vector<unsigned>& occupations) const;

private:
  std::vector<unsigned> cutoffs_;
  std::vector<std::size_t> strides_;
  std::size_t dim_ = 0;
  std::vector<unsigned> occ_;
  std::vector<unsigned> total_;
};

/// Sparse operators of the driven Kerr dimer chain in a truncated Fock space.
struct OperatorSet {
  FockBasis basis;
  std::vector<SparseMatrix> annihilation;   // a_j
  std::vector<Eigen::VectorXd> number;      // diagonal of n_j
  std::vector<Eigen::VectorXd> pair;        // diagonal of a_j^+ a_j^+ a_j a_j = n_j (n_j - 1)
  SparseMatrix hamiltonian;                 // hopping + onsite + Kerr + drive

  /// Non-Hermitian drift H - (i/2) sum L'^+ L' + shift for the unraveling
  /// with jump operators {sqrt(gamma) a_j + beta, sqrt(kappa) n_j + beta}.
  /// Channels with zero rate are omitted.
  SparseMatrix drift(const LatticeSpec& spec, double beta) const;
};

/// a_j on the tensor-product basis.
SparseMatrix annihilation_operator(const FockBasis& basis, std::size_t site);

/// Throws BudgetError when the Fock dimension exceeds `fock.budget`.
OperatorSet build_operators(const LatticeSpec& spec, const FockSpec& fock);

SparseMatrix diagonal_matrix(const Eigen::VectorXd& diag);

/// S^{-1} O S with S = diag(scale^photons): entry (r, c) times
/// scale^(photons(c) - photons(r)). Representing states as psi_k / scale^n_k
/// keeps every component O(1) under weak drive.
SparseMatrix graded(const SparseMatrix& op, const FockBasis& basis, double scale);

/// Grading scale for a drive: min(1, max_j |F_j|), or 1 when undriven.
double grading_scale(const LatticeSpec& spec);

}  // namespace upb::master
