#include "upb/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "upb/error.hpp"
#include "upb/log.hpp"

namespace upb::analytics {
namespace {

const char* kModule = "analytics";

void require_even(std::size_t n_sites) {
  if (n_sites < 2 || n_sites % 2 != 0) throw ValidationError(kModule, "n_sites must be even");
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

Integer binomial(int n, int k) {
  Integer r = 1;
  for (int i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

// (N-2)!! / (N-3)!! as a double.
double factorial_ratio(std::size_t n_sites) {
  const int n = static_cast<int>(n_sites);
  return to_double(Rational(double_factorial(n - 2), double_factorial(n - 3)));
}

}  // namespace

Integer double_factorial(int n) {
  if (n < -1) {
    std::ostringstream os;
    os << "double factorial undefined for n = " << n;
    throw ValidationError(kModule, os.str());
  }
  Integer r = 1;
  for (int k = n; k > 1; k -= 2) r *= k;
  return r;
}

Rational reciprocal_double_factorial(int n) {
  if (n >= -1) return Rational(1) / Rational(double_factorial(n));
  if (n % 2 == 0) return Rational(0);
  // (-(2k+1))!! = (-1)^k / (2k-1)!!
  const int k = (-n - 1) / 2;
  Rational r(double_factorial(2 * k - 1));
  return (k % 2 == 0) ? r : Rational(-r);
}

Rational g_coefficient(int a, int b) {
  if (a < -1 || b < -1) {
    std::ostringstream os;
    os << "G(" << a << ", " << b << ") needs a, b >= -1";
    throw ValidationError(kModule, os.str());
  }
  return Rational(double_factorial(b)) / Rational(double_factorial(a)) *
         reciprocal_double_factorial(b - a);
}

Rational g_sum(int n_sites, int two_p) {
  if (n_sites < 2 || n_sites % 2 != 0) throw ValidationError(kModule, "n_sites must be even");
  if (two_p < 0 || two_p % 2 != 0) throw ValidationError(kModule, "2p must be a non-negative even integer");
  Rational sum = 0;
  for (int h = 0; h <= two_p; ++h) {
    Rational term = Rational(binomial(two_p, h)) * g_coefficient(n_sites - 2, two_p - h + 1) *
                    g_coefficient(n_sites - 2, h + 1);
    if (h % 2 == 1) term = -term;
    sum += term;
  }
  return sum;
}

Rational gsum_identity(int n_sites) {
  const Rational lhs = g_sum(n_sites, n_sites - 2);
  Rational rhs = Rational(double_factorial(n_sites - 3)) / Rational(double_factorial(n_sites - 2));
  if ((n_sites / 2 + 1) % 2 != 0) rhs = -rhs;
  if (lhs != rhs) {
    std::ostringstream os;
    os << "G-sum identity failed for N = " << n_sites << ": " << lhs << " != " << rhs;
    throw ConsistencyError(kModule, os.str());
  }
  return lhs;
}

LeadingAmplitudes leading_amplitudes(std::size_t n_sites, double intercell, cplx z, double f1) {
  require_even(n_sites);
  const int n = static_cast<int>(n_sites);
  LeadingAmplitudes out;
  out.in_annulus = std::abs(intercell) < std::abs(z) && std::abs(z) < 1.0;
  if (!out.in_annulus) {
    std::ostringstream os;
    os << "|z| = " << std::abs(z) << " outside the expansion annulus t < |z| < 1 (t = "
       << intercell << ")";
    warn(kModule, os.str());
  }
  if (std::abs(intercell) >= 1.0) {
    warn(kModule, "intercell coupling t >= 1; closed forms assume t << 1");
  }
  const double prefactor = f1 * f1 / std::numbers::sqrt2 * std::pow(intercell, n - 2);
  out.linear_part = prefactor * z * z;
  const double sign = ((n / 2 + 1) % 2 == 0) ? 1.0 : -1.0;
  out.correction_part = prefactor * sign / factorial_ratio(n_sites) / std::pow(2.0 * z, n - 1);
  return out;
}

cplx upb_alpha(std::size_t n_sites, cplx z) {
  require_even(n_sites);
  const int n = static_cast<int>(n_sites);
  const double sign = ((n / 2) % 2 == 0) ? 1.0 : -1.0;
  return sign / 4.0 * factorial_ratio(n_sites) * std::pow(2.0 * z, n + 1);
}

bool is_physical(cplx alpha, double tol) {
  return std::abs(alpha.imag()) <= tol * std::abs(alpha);
}

std::vector<cplx> root_directions(std::size_t n_sites, bool negative_alpha) {
  require_even(n_sites);
  const int n = static_cast<int>(n_sites);
  // z/|z| is an (N+1)-th root of (-1)^(N/2) for alpha > 0, (-1)^(N/2+1) otherwise.
  const int power = n / 2 + (negative_alpha ? 1 : 0);
  const double base = (power % 2 == 0) ? 0.0 : std::numbers::pi;
  std::vector<cplx> roots;
  for (int k = 0; k <= n; ++k) {
    const double phase = (base + 2.0 * std::numbers::pi * k) / (n + 1);
    const cplx u = std::polar(1.0, phase);
    if (u.imag() < -1e-12) roots.push_back(u);
  }
  std::stable_sort(roots.begin(), roots.end(), [](cplx a, cplx b) {
    if (std::abs(a.imag() - b.imag()) > 1e-12) return a.imag() < b.imag();
    return std::abs(a.real()) < std::abs(b.real());
  });
  return roots;
}

OptimalPoint optimal_point(std::size_t n_sites, double gamma, const RootOptions& opts) {
  require_even(n_sites);
  if (!(gamma > 0.0)) throw ValidationError(kModule, "gamma must be > 0");
  const auto roots = root_directions(n_sites, opts.negative_alpha);
  if (opts.root_index >= roots.size()) {
    std::ostringstream os;
    os << "root_index " << opts.root_index << " out of range (" << roots.size()
       << " lossy roots)";
    throw ValidationError(kModule, os.str());
  }
  const cplx u = roots[opts.root_index];
  const double radius = 0.5 * gamma / -u.imag();
  OptimalPoint p;
  p.root_index = opts.root_index;
  p.z = radius * u;
  p.z.imag(-0.5 * gamma);
  p.energy = p.z.real();
  p.theta = -std::arg(u);
  p.alpha = upb_alpha(n_sites, p.z).real();
  if (!opts.negative_alpha && opts.root_index == 0) {
    // Default branch has the closed form E = (gamma/2) cot(theta),
    // alpha = (1/4) (N-2)!!/(N-3)!! (gamma csc(theta))^(N+1).
    const double n = static_cast<double>(n_sites);
    const double theta = n / (n + 1.0) * std::numbers::pi / 2.0;
    p.theta = theta;
    p.energy = 0.5 * gamma / std::tan(theta);
    p.alpha = 0.25 * factorial_ratio(n_sites) * std::pow(gamma / std::sin(theta), n + 1.0);
    p.z = cplx(p.energy, -0.5 * gamma);
  }
  return p;
}

double occupation_estimate(std::size_t n_sites, double intercell, cplx z, double f1) {
  require_even(n_sites);
  return f1 * f1 * std::pow(intercell, static_cast<double>(n_sites) - 2.0) * std::norm(z);
}

}  // namespace upb::analytics
