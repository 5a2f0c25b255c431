#include "upb/liouvillian.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/SparseLU>
#include <unsupported/Eigen/KroneckerProduct>

#include "upb/error.hpp"

namespace upb::master {
namespace {

const char* kModule = "master";

using ColSparse = Eigen::SparseMatrix<cplx, Eigen::ColMajor>;

}  // namespace

DensityMatrix::DensityMatrix(FockBasis basis, Eigen::MatrixXcd graded, double scale)
    : basis_(std::move(basis)), graded_(std::move(graded)), scale_(scale) {
  const auto d = static_cast<Eigen::Index>(basis_.dimension());
  weight_.resize(d);
  for (Eigen::Index k = 0; k < d; ++k) {
    weight_(k) = std::pow(scale_, 2.0 * basis_.total_photons(static_cast<std::size_t>(k)));
  }
}

Eigen::MatrixXcd DensityMatrix::physical() const {
  const Eigen::VectorXd s = weight_.cwiseSqrt();
  return s.asDiagonal() * graded_ * s.asDiagonal();
}

double DensityMatrix::trace() const { return expect_diagonal(Eigen::VectorXd::Ones(weight_.size())); }

double DensityMatrix::purity() const {
  double p = 0.0;
  for (Eigen::Index c = 0; c < graded_.cols(); ++c) {
    for (Eigen::Index r = 0; r < graded_.rows(); ++r) {
      p += weight_(r) * weight_(c) * std::norm(graded_(r, c));
    }
  }
  return p;
}

double DensityMatrix::hermiticity_error() const {
  const Eigen::MatrixXcd rho = physical();
  return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
  const Eigen::MatrixXcd rho = physical();
  const Eigen::MatrixXcd herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double DensityMatrix::expect_diagonal(const Eigen::VectorXd& diag) const {
  double s = 0.0;
  for (Eigen::Index k = 0; k < diag.size(); ++k) s += weight_(k) * diag(k) * graded_(k, k).real();
  return s;
}

double DensityMatrix::occupation(std::size_t site) const {
  Eigen::VectorXd n(weight_.size());
  for (Eigen::Index k = 0; k < n.size(); ++k) n(k) = basis_.occupation(static_cast<std::size_t>(k), site);
  return expect_diagonal(n);
}

double DensityMatrix::pair_correlation(std::size_t site) const {
  Eigen::VectorXd p(weight_.size());
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    const double o = basis_.occupation(static_cast<std::size_t>(k), site);
    p(k) = o * (o - 1.0);
  }
  return expect_diagonal(p);
}

double DensityMatrix::g2(std::size_t site) const {
  const double n = occupation(site);
  if (!(n > 0.0)) throw UndefinedCorrelationError(kModule, "g2 undefined: zero occupation on signal site");
  return pair_correlation(site) / (n * n);
}

DensityMatrix liouvillian_steady_state(const LatticeSpec& spec, const FockSpec& fock) {
  spec.validate();
  fock.validate(spec.n_sites);
  const double dim = fock.dimension();
  if (dim > static_cast<double>(kLiouvillianDimensionLimit)) {
    std::ostringstream os;
    os << "Fock dimension " << dim << " too large for the direct Liouvillian solve (limit "
       << kLiouvillianDimensionLimit << "); use wfmc_run instead";
    throw BudgetError(kModule, os.str(), dim);
  }
  const OperatorSet ops = build_operators(spec, fock);
  const FockBasis& basis = ops.basis;
  const double scale = grading_scale(spec);
  const auto d = static_cast<Eigen::Index>(basis.dimension());
  const cplx i1{0.0, 1.0};

  // Graded generator: L(rho) = -i (Heff rho - rho Heff^+) + sum_k L_k rho L_k^+,
  // vectorized column-major as vec(A X B) = (B^T kron A) vec(X).
  std::vector<ColSparse> jumps;
  Eigen::VectorXd decay = Eigen::VectorXd::Zero(d);
  for (std::size_t j = 0; j < spec.n_sites; ++j) {
    if (spec.loss > 0.0) {
      jumps.emplace_back(graded(std::sqrt(spec.loss) * ops.annihilation[j], basis, scale));
      decay += spec.loss * ops.number[j];
    }
    if (spec.dephasing > 0.0) {
      jumps.emplace_back(std::sqrt(spec.dephasing) * diagonal_matrix(ops.number[j]));
      decay += spec.dephasing * ops.number[j].cwiseProduct(ops.number[j]);
    }
  }
  ColSparse heff = graded(ops.hamiltonian, basis, scale);
  heff += (-0.5 * i1) * ColSparse(diagonal_matrix(decay));

  ColSparse eye(d, d);
  eye.setIdentity();
  ColSparse gen = -i1 * ColSparse(Eigen::kroneckerProduct(eye, heff));
  gen += i1 * ColSparse(Eigen::kroneckerProduct(ColSparse(heff.conjugate()), eye));
  for (const ColSparse& l : jumps) {
    gen += ColSparse(Eigen::kroneckerProduct(ColSparse(l.conjugate()), l));
  }

  // Replace the vacuum-population row by the trace condition.
  using RowSparse = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;
  RowSparse rows(gen);
  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(static_cast<std::size_t>(rows.nonZeros() + d));
  for (Eigen::Index r = 1; r < rows.outerSize(); ++r) {
    for (RowSparse::InnerIterator it(rows, r); it; ++it) trip.emplace_back(r, it.col(), it.value());
  }
  for (Eigen::Index k = 0; k < d; ++k) {
    trip.emplace_back(0, k * d + k, std::pow(scale, 2.0 * basis.total_photons(static_cast<std::size_t>(k))));
  }
  ColSparse system(d * d, d * d);
  system.setFromTriplets(trip.begin(), trip.end());
  system.makeCompressed();

  Eigen::SparseLU<ColSparse> lu;
  lu.compute(system);
  if (lu.info() != Eigen::Success) {
    throw SingularMatrixError(kModule, "Liouvillian factorization failed: " + lu.lastErrorMessage());
  }
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(d * d);
  rhs(0) = 1.0;
  const Eigen::VectorXcd x = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !x.allFinite()) {
    throw SingularMatrixError(kModule, "Liouvillian solve failed");
  }
  Eigen::MatrixXcd rho = Eigen::Map<const Eigen::MatrixXcd>(x.data(), d, d);
  return DensityMatrix(basis, std::move(rho), scale);
}

}  // namespace upb::master
