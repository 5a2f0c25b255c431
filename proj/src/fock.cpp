#include "upb/fock.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "upb/error.hpp"

namespace upb::master {
namespace {

const char* kModule = "master";

}  // namespace

FockSpec FockSpec::uniform(std::size_t n_sites, unsigned cutoff) {
  FockSpec f;
  f.cutoffs.assign(n_sites, cutoff);
  return f;
}

double FockSpec::dimension() const {
  double d = 1.0;
  for (unsigned c : cutoffs) d *= static_cast<double>(c) + 1.0;
  return d;
}

void FockSpec::validate(std::size_t n_sites) const {
  if (cutoffs.size() != n_sites) {
    std::ostringstream os;
    os << "fock cutoffs has " << cutoffs.size() << " entries, expected " << n_sites;
    throw ValidationError(kModule, os.str());
  }
  for (unsigned c : cutoffs) {
    if (c < 1) throw ValidationError(kModule, "fock cutoffs must be >= 1");
  }
  const double d = dimension();
  if (d > budget) {
    std::ostringstream os;
    os << "Fock dimension " << d << " exceeds budget " << budget;
    throw BudgetError(kModule, os.str(), d);
  }
}

FockBasis::FockBasis(const FockSpec& spec) : cutoffs_(spec.cutoffs) {
  const std::size_t n = cutoffs_.size();
  strides_.assign(n, 1);
  dim_ = 1;
  for (std::size_t j = n; j-- > 0;) {
    strides_[j] = dim_;
    dim_ *= cutoffs_[j] + 1;
  }
  occ_.resize(dim_ * n);
  total_.resize(dim_);
  for (std::size_t k = 0; k < dim_; ++k) {
    unsigned tot = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const unsigned o = static_cast<unsigned>((k / strides_[j]) % (cutoffs_[j] + 1));
      occ_[k * n + j] = o;
      tot += o;
    }
    total_[k] = tot;
  }
}

std::size_t FockBasis::index(const std::vector<unsigned>& occupations) const {
  if (occupations.size() != cutoffs_.size()) throw ValidationError(kModule, "occupation length mismatch");
  std::size_t k = 0;
  for (std::size_t j = 0; j < occupations.size(); ++j) {
    if (occupations[j] > cutoffs_[j]) throw ValidationError(kModule, "occupation above cutoff");
    k += occupations[j] * strides_[j];
  }
  return k;
}

SparseMatrix diagonal_matrix(const Eigen::VectorXd& diag) {
  const auto d = diag.size();
  SparseMatrix m(d, d);
  std::vector<Eigen::Triplet<cplx>> t;
  t.reserve(static_cast<std::size_t>(d));
  for (Eigen::Index k = 0; k < d; ++k) {
    if (diag(k) != 0.0) t.emplace_back(k, k, diag(k));
  }
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SparseMatrix annihilation_operator(const FockBasis& basis, std::size_t site) {
  if (site >= basis.n_sites()) throw ValidationError(kModule, "site out of range");
  const auto d = static_cast<Eigen::Index>(basis.dimension());
  std::vector<Eigen::Triplet<cplx>> t;
  for (Eigen::Index k = 0; k < d; ++k) {
    const unsigned o = basis.occupation(static_cast<std::size_t>(k), site);
    if (o > 0) t.emplace_back(k - static_cast<Eigen::Index>(basis.stride(site)), k, std::sqrt(static_cast<double>(o)));
  }
  SparseMatrix a(d, d);
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

OperatorSet build_operators(const LatticeSpec& spec, const FockSpec& fock) {
  spec.validate();
  fock.validate(spec.n_sites);
  OperatorSet ops{FockBasis(fock), {}, {}, {}, {}};
  const FockBasis& basis = ops.basis;
  const auto d = static_cast<Eigen::Index>(basis.dimension());
  const std::size_t n = spec.n_sites;

  for (std::size_t j = 0; j < n; ++j) {
    Eigen::VectorXd num(d), pr(d);
    for (Eigen::Index k = 0; k < d; ++k) {
      const unsigned o = basis.occupation(static_cast<std::size_t>(k), j);
      num(k) = o;
      pr(k) = static_cast<double>(o) * (static_cast<double>(o) - 1.0);
    }
    ops.annihilation.push_back(annihilation_operator(basis, j));
    ops.number.push_back(std::move(num));
    ops.pair.push_back(std::move(pr));
  }

  const Eigen::MatrixXd hop = build_hamiltonian(spec);
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(d);
  for (std::size_t j = 0; j < n; ++j) {
    diag += spec.onsite_energy * ops.number[j] + spec.kerr * ops.pair[j];
  }
  SparseMatrix h = diagonal_matrix(diag);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double w = hop(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (w == 0.0) continue;
      SparseMatrix term = SparseMatrix(ops.annihilation[i].adjoint()) * ops.annihilation[j];
      h += w * term;
      h += w * SparseMatrix(term.adjoint());
    }
    if (spec.drive[i] != cplx{}) {
      h += spec.drive[i] * SparseMatrix(ops.annihilation[i].adjoint());
      h += std::conj(spec.drive[i]) * ops.annihilation[i];
    }
  }
  h.prune(cplx{});
  ops.hamiltonian = std::move(h);
  return ops;
}

SparseMatrix OperatorSet::drift(const LatticeSpec& spec, double beta) const {
  const cplx i1{0.0, 1.0};
  const auto d = static_cast<Eigen::Index>(basis.dimension());
  Eigen::VectorXd decay = Eigen::VectorXd::Zero(d);
  int channels = 0;
  SparseMatrix shifted(d, d);
  for (std::size_t j = 0; j < spec.n_sites; ++j) {
    if (spec.loss > 0.0) {
      decay += spec.loss * number[j];
      shifted += std::sqrt(spec.loss) * annihilation[j];
      ++channels;
    }
    if (spec.dephasing > 0.0) {
      decay += spec.dephasing * number[j].cwiseProduct(number[j]);
      shifted += std::sqrt(spec.dephasing) * diagonal_matrix(number[j]);
      ++channels;
    }
  }
  // H' - (i/2) sum L'^+ L' with L' = L + beta: the beta cross terms combine
  // with the Hamiltonian shift (beta/2i)(L - L^+) into -i beta L.
  decay.array() += beta * beta * channels;
  SparseMatrix out = hamiltonian;
  out += (-0.5 * i1) * diagonal_matrix(decay);
  if (beta != 0.0) out += (-i1 * beta) * shifted;
  out.prune(cplx{});
  return out;
}

SparseMatrix graded(const SparseMatrix& op, const FockBasis& basis, double scale) {
  if (scale == 1.0) return op;
  SparseMatrix out = op;
  for (Eigen::Index r = 0; r < out.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(out, r); it; ++it) {
      const int dn = static_cast<int>(basis.total_photons(static_cast<std::size_t>(it.col()))) -
                     static_cast<int>(basis.total_photons(static_cast<std::size_t>(it.row())));
      it.valueRef() *= std::pow(scale, dn);
    }
  }
  return out;
}

double grading_scale(const LatticeSpec& spec) {
  double f = 0.0;
  for (const cplx& v : spec.drive) f = std::max(f, std::abs(v));
  if (!(f > 0.0)) return 1.0;
  return std::min(1.0, f);
}

}  // namespace upb::master
