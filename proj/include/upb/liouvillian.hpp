#pragma once

#include <cstddef>

#include <Eigen/Dense>

#include "upb/fock.hpp"
#include "upb/lattice.hpp"

namespace upb::master {

/// Steady-state density matrix stored in graded form: the physical matrix is
/// S * graded * S with S = diag(scale^photons). Expectation helpers undo the
/// grading, so weak-drive populations of order F^4 keep full relative precision.
class DensityMatrix {
public:
  DensityMatrix(FockBasis basis, Eigen::MatrixXcd graded, double scale);

  const FockBasis& basis() const { return basis_; }
  const Eigen::MatrixXcd& graded() const { return graded_; }
  double scale() const { return scale_; }
  Eigen::MatrixXcd physical() const;

  double trace() const;
  double purity() const;
  /// max |rho - rho^+| entrywise on the physical matrix.
  double hermiticity_error() const;
  double min_eigenvalue() const;

  /// Tr(rho D) for an operator diagonal in the Fock basis.
  double expect_diagonal(const Eigen::VectorXd& diag) const;
  double occupation(std::size_t site) const;
  /// <a^+ a^+ a a> on `site`.
  double pair_correlation(std::size_t site) const;
  /// <a^+ a^+ a a> / <n>^2. Throws UndefinedCorrelationError for zero occupation.
  double g2(std::size_t site) const;

private:
  FockBasis basis_;
  Eigen::MatrixXcd graded_;
  double scale_;
  Eigen::VectorXd weight_;  // scale^(2 * photons)
};

/// Largest Fock dimension accepted by the direct Liouvillian solve.
inline constexpr std::size_t kLiouvillianDimensionLimit = 300;

/// Solves L(rho) = 0 with Tr rho = 1 for loss and dephasing channels by a
/// sparse direct factorization of the vectorized Liouvillian. Throws
/// BudgetError above kLiouvillianDimensionLimit.
DensityMatrix liouvillian_steady_state(const LatticeSpec& spec, const FockSpec& fock);

}  // namespace upb::master
