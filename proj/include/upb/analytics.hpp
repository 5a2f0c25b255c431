#pragma once

#include <cstddef>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "upb/lattice.hpp"

namespace upb::analytics {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// n!! for n >= -1, with (-1)!! = 0!! = 1. Throws ValidationError for n < -1.
Integer double_factorial(int n);

/// 1 / n!! for any integer n, using the continuation n!! = (n+2)!!/(n+2) for
/// negative odd n, so (-3)!! = -1, (-5)!! = 1/3, ... . Negative even n are
/// poles of the continuation and give 0.
Rational reciprocal_double_factorial(int n);

/// G(a, b) = b!! / (a!! (b-a)!!). Requires a, b >= -1; (b-a)!! uses the
/// continuation above.
Rational g_coefficient(int a, int b);

/// sum_{h=0}^{2p} (-1)^h C(2p, h) G(N-2, 2p-h+1) G(N-2, h+1).
Rational g_sum(int n_sites, int two_p);

/// Evaluates g_sum(N, N-2) and checks it against (-1)^(N/2+1) (N-3)!!/(N-2)!!.
/// Throws ConsistencyError on mismatch.
Rational gsum_identity(int n_sites);

struct LeadingAmplitudes {
  cplx linear_part;      // leading <N-1,N-1|psi2_0>
  cplx correction_part;  // leading <N-1,N-1|psi2_1>
  bool in_annulus = true;  // t < |z| < 1
};

LeadingAmplitudes leading_amplitudes(std::size_t n_sites, double intercell, cplx z, double f1);

/// Kerr coefficient that cancels the two leading amplitudes at this z:
/// ((-1)^(N/2) / 4) ((N-2)!!/(N-3)!!) (2z)^(N+1). Real only on the root rays.
cplx upb_alpha(std::size_t n_sites, cplx z);

/// True when |Im alpha| <= tol * |alpha|.
bool is_physical(cplx alpha, double tol = 1e-9);

struct OptimalPoint {
  double theta = 0.0;   // angle of z below the real axis
  double energy = 0.0;
  double alpha = 0.0;
  cplx z;
  std::size_t root_index = 0;
};

struct RootOptions {
  std::size_t root_index = 0;  // 0 = root with the most negative imaginary part
  bool negative_alpha = false;
};

/// Lossy (Im z < 0) directions on which upb_alpha is real with the requested
/// sign, ordered by decreasing |Im| of the unit root, ties by smaller |Re|.
std::vector<cplx> root_directions(std::size_t n_sites, bool negative_alpha);

/// Closed-form optimum (E, alpha) for loss rate `gamma`.
OptimalPoint optimal_point(std::size_t n_sites, double gamma, const RootOptions& opts = {});

/// F1^2 t^(N-2) |z|^2.
double occupation_estimate(std::size_t n_sites, double intercell, cplx z, double f1);

}  // namespace upb::analytics
