#pragma once

#include <cstddef>
#include <string>

#include <Eigen/Dense>

#include "upb/lattice.hpp"

namespace upb::weakdrive {

/// Amplitudes <j|psi1> of the one-photon steady state.
struct OnePhotonState {
  Eigen::VectorXcd amplitudes;
};

/// Amplitudes <i,j|psi2> in the unsymmetrized tensor basis. Always symmetric.
/// The Fock amplitude of two photons on site i is amplitudes(i, i); for i != j
/// the Fock amplitude of one photon on each is sqrt(2) * amplitudes(i, j).
struct TwoPhotonState {
  Eigen::MatrixXcd amplitudes;
};

enum class Method { exact, perturbative };

const char* to_string(Method m);
Method method_from_string(const std::string& s);

struct WeakDriveSolution {
  OnePhotonState one_photon;
  TwoPhotonState two_photon;
  Eigen::VectorXd g2_per_site;  // NaN where the one-photon amplitude vanishes
  Method method = Method::exact;
};

/// The two pieces of the perturbative two-photon state, psi2 = linear + kerr * correction.
struct PerturbativeParts {
  TwoPhotonState linear;
  TwoPhotonState correction;
};

/// psi1 = -(z + H)^{-1} F by direct solve.
OnePhotonState solve_one_photon(const LatticeSpec& spec);

/// psi1 = -sum_n f_n phi_n / (z + eps_n), f_n = sum_j F_j <phi_n|j>.
OnePhotonState solve_one_photon(const LatticeSpec& spec, const SingleParticleSpectrum& spectrum);

/// Direct solve of the two-photon steady-state equation in the symmetrized
/// basis {|i,j>, i <= j}, Kerr shift 2*alpha on doubly occupied states.
TwoPhotonState solve_two_photon_exact(const LatticeSpec& spec, const OnePhotonState& psi1);

/// First-order Dyson expansion in the Kerr coefficient, evaluated in the
/// single-particle eigenbasis.
PerturbativeParts perturbative_parts(const LatticeSpec& spec, const SingleParticleSpectrum& spectrum);
TwoPhotonState solve_two_photon_perturbative(const LatticeSpec& spec,
                                             const SingleParticleSpectrum& spectrum);

WeakDriveSolution solve(const LatticeSpec& spec, Method method);
/// Same, reusing a spectrum of build_hamiltonian(spec) across many z.
WeakDriveSolution solve(const LatticeSpec& spec, Method method, const SingleParticleSpectrum& spectrum);

/// 2 |<s,s|psi2>|^2 / |<s|psi1>|^4. Throws UndefinedCorrelationError when the
/// one-photon amplitude on `site` vanishes.
double g2_zero_delay(const WeakDriveSolution& sol, std::size_t site);

/// <s,s|psi2>.
cplx signal_amplitude(const WeakDriveSolution& sol, std::size_t site);

/// Site N-1 in 1-based numbering, i.e. index n_sites - 2 (0 for a dimer).
std::size_t default_signal_site(std::size_t n_sites);

/// Above this many sites the exact two-photon solve warns about its cost.
inline constexpr std::size_t kDenseSiteLimit = 64;

}  // namespace upb::weakdrive
