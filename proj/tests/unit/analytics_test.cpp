#include <cmath>
#include <numbers>

#include <doctest.h>

#include "upb/analytics.hpp"
#include "upb/error.hpp"
#include "upb/weakdrive.hpp"

using namespace upb;
using namespace upb::analytics;

namespace {

// Independent closed form: theta = N pi / (2(N+1)), E = (gamma/2) cot theta,
// alpha = (1/4) K (gamma / sin theta)^(N+1), K = (N-2)!!/(N-3)!!.
double dfact(int n) {
  double r = 1.0;
  for (int k = n; k > 1; k -= 2) r *= k;
  return r;
}

}  // namespace

TEST_SUITE("analytics") {
  TEST_CASE("double factorial") {
    CHECK(double_factorial(-1) == 1);
    CHECK(double_factorial(0) == 1);
    CHECK(double_factorial(4) == 8);
    CHECK(double_factorial(5) == 15);
    CHECK(double_factorial(7) == 105);
    CHECK(double_factorial(6) == 48);
    CHECK(double_factorial(19) == Integer("654729075"));
    CHECK_THROWS_AS(double_factorial(-2), ValidationError);
  }

  TEST_CASE("reciprocal double factorial continuation") {
    CHECK(reciprocal_double_factorial(4) == Rational(1, 8));
    CHECK(reciprocal_double_factorial(-1) == 1);
    CHECK(reciprocal_double_factorial(-3) == -1);
    CHECK(reciprocal_double_factorial(-5) == 3);
    CHECK(reciprocal_double_factorial(-7) == -15);
    CHECK(reciprocal_double_factorial(-2) == 0);
  }

  TEST_CASE("G coefficient") {
    CHECK(g_coefficient(2, 3) == Rational(3, 2));
    CHECK(g_coefficient(2, 1) == Rational(1, 2));
    CHECK(g_coefficient(2, 2) == 1);
    CHECK(g_coefficient(2, 4) == 2);
    CHECK(g_coefficient(2, 5) == Rational(5, 2));
    CHECK(g_coefficient(-1, 3) == Rational(3, 8));
  }

  TEST_CASE("G sum identity, hand-evaluated cases") {
    CHECK(gsum_identity(4) == Rational(-1, 2));
    CHECK(gsum_identity(6) == Rational(3, 8));
    CHECK(gsum_identity(8) == Rational(-5, 16));
  }

  TEST_CASE("G sum identity for every even N up to 20") {
    for (int n = 2; n <= 20; n += 2) {
      CAPTURE(n);
      const Rational expected = (n / 2 % 2 == 0 ? -1 : 1) * Rational(double_factorial(n - 3), double_factorial(n - 2));
      CHECK(gsum_identity(n) == expected);
    }
  }

  TEST_CASE("G sum vanishes for 2p >= N") {
    for (int n = 4; n <= 12; n += 2) {
      for (int p = n / 2; p <= n / 2 + 3; ++p) {
        CAPTURE(n);
        CAPTURE(p);
        CHECK(g_sum(n, 2 * p) == 0);
      }
    }
  }

  TEST_CASE("optimal point, dimer") {
    const auto p = optimal_point(2, 0.3);
    CHECK(p.energy == doctest::Approx(0.0866025).epsilon(1e-6));
    CHECK(p.alpha == doctest::Approx(0.0103923).epsilon(1e-5));
    CHECK(p.theta == doctest::Approx(std::numbers::pi / 3));
    CHECK(p.z.imag() == doctest::Approx(-0.15));
  }

  TEST_CASE("optimal point matches the closed form for longer chains") {
    for (std::size_t n : {4u, 6u, 8u, 10u}) {
      for (double gamma : {0.3, 0.5}) {
        const double theta = static_cast<double>(n) * std::numbers::pi / (2.0 * (n + 1));
        const double k = dfact(static_cast<int>(n) - 2) / dfact(static_cast<int>(n) - 3);
        const double alpha = 0.25 * k * std::pow(gamma / std::sin(theta), static_cast<double>(n + 1));
        const auto p = optimal_point(n, gamma);
        CHECK(p.energy == doctest::Approx(0.5 * gamma / std::tan(theta)).epsilon(1e-12));
        CHECK(p.alpha == doctest::Approx(alpha).epsilon(1e-12));
      }
    }
    CHECK(optimal_point(4, 0.3).alpha == doctest::Approx(1.5615e-3).epsilon(1e-4));
    CHECK(optimal_point(6, 0.3).alpha == doctest::Approx(1.7416e-4).epsilon(1e-4));
  }

  TEST_CASE("UPB alpha is real and positive at the optimum") {
    for (std::size_t n : {2u, 4u, 6u, 8u}) {
      const auto p = optimal_point(n, 0.4);
      const cplx a = upb_alpha(n, p.z);
      CHECK(is_physical(a));
      CHECK(a.real() == doctest::Approx(p.alpha).epsilon(1e-12));
    }
    CHECK_FALSE(is_physical(upb_alpha(4, cplx{0.1, -0.1})));
  }

  TEST_CASE("leading amplitudes cancel at the UPB alpha") {
    const std::size_t n = 6;
    const auto p = optimal_point(n, 0.3);
    const auto lead = leading_amplitudes(n, 0.1, p.z, 1.0);
    const cplx total = lead.linear_part + p.alpha * lead.correction_part;
    CHECK(std::abs(total) < 1e-12 * std::abs(lead.linear_part));
    CHECK(lead.in_annulus);
  }

  TEST_CASE("root directions") {
    for (std::size_t n : {2u, 4u, 6u}) {
      for (bool neg : {false, true}) {
        const auto roots = root_directions(n, neg);
        CHECK(!roots.empty());
        for (std::size_t k = 0; k < roots.size(); ++k) {
          CHECK(roots[k].imag() < 0.0);
          CHECK(std::abs(std::abs(roots[k]) - 1.0) < 1e-12);
          const cplx a = upb_alpha(n, 0.2 * roots[k]);
          CHECK(is_physical(a));
          CHECK((a.real() > 0) != neg);
          if (k > 0) CHECK(roots[k].imag() >= roots[k - 1].imag() - 1e-12);
        }
      }
    }
    const auto p = optimal_point(4, 0.3, RootOptions{1, false});
    CHECK(p.root_index == 1);
    CHECK(p.alpha > 0.0);
  }

  TEST_CASE("occupation estimate") {
    CHECK(occupation_estimate(4, 0.1, cplx{0.3, -0.4}, 1e-4) == doctest::Approx(1e-8 * 0.01 * 0.25));
  }

  TEST_CASE("leading amplitudes converge to the perturbative solve for small |z|") {
    for (std::size_t n : {2u, 4u, 6u}) {
      double previous = 1.0;
      for (double r : {0.1, 0.03, 0.01}) {
        const cplx z = r * std::polar(1.0, -0.9);
        const double t = 1e-2 * r;
        const LatticeSpec s = LatticeSpec::driven_first_site(n, t, z.real(), -2.0 * z.imag(), 0.0, 1.0);
        const auto parts = weakdrive::perturbative_parts(s, eigendecompose(build_hamiltonian(s)));
        const auto lead = leading_amplitudes(n, t, z, 1.0);
        const std::size_t k = n - 2;
        const double err = std::max(std::abs(parts.linear.amplitudes(k, k) / lead.linear_part - 1.0),
                                    std::abs(parts.correction.amplitudes(k, k) / lead.correction_part - 1.0));
        CAPTURE(n);
        CAPTURE(r);
        CHECK(err < 10.0 * r * r);
        CHECK(err < previous);
        previous = err;
      }
    }
  }
}
