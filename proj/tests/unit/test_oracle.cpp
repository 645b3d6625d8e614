#include <doctest.h>

#include <cmath>

#include "pulsectl/error.hpp"
#include "pulsectl/oracle.hpp"
#include "pulsectl/spectral.hpp"

using namespace pulsectl;

TEST_CASE("discrete spectrum of the fast operator") {
  const auto top = top_eigenvalues(FastOperator::build(FastGrid{}), 3);
  REQUIRE(top.size() == 3);
  CHECK(top[0] == doctest::Approx(1.25).epsilon(1e-3));
  CHECK(std::abs(top[1]) < 1e-3);
  CHECK(top[2] == doctest::Approx(-0.75).epsilon(1e-3));
}

TEST_CASE("grid validation") {
  CHECK_NOTHROW(FastGrid{}.validate());
  CHECK_THROWS_AS((FastGrid{-40.0, 30.0, 8001}).validate(), InvalidParameter);
  CHECK_THROWS_AS((FastGrid{-10.0, 10.0, 8001}).validate(), InvalidParameter);
  CHECK_THROWS_AS((FastGrid{-40.0, 40.0, 2}).validate(), InvalidParameter);
}

TEST_CASE("fast pulse") {
  CHECK(fast_pulse(0.0) == doctest::Approx(1.5));
  CHECK(fast_pulse(3.0) == doctest::Approx(fast_pulse(-3.0)));
}

TEST_CASE("oracle reproduces the closed form") {
  for (cplx z : {cplx(2.0, 0.0), cplx(3.0, 1.0), cplx(0.5, 4.0), cplx(20.0, -3.0)}) {
    INFO(z);
    CHECK(std::abs(r_oracle(z) - r_total(z).total) < 1e-6);
  }
}

TEST_CASE("Richardson step improves on a single grid") {
  const cplx z(3.0, 1.0);
  const cplx exact = r_total(z).total;
  CHECK(std::abs(r_oracle(z) - exact) < std::abs(r_oracle_raw(z, FastGrid{}) - exact));
}

TEST_CASE("bound states are singular points of the solve") {
  CHECK_THROWS_AS(solve_vin(kPoleHigh, FastGrid{}), NearEigenvalue);
  CHECK_THROWS_AS(solve_vin(kPoleLow, FastGrid{}), NearEigenvalue);
  const auto v = solve_vin(2.0, FastGrid{});
  CHECK(v.size() == FastGrid{}.n);
  CHECK(v.front() == cplx(0.0, 0.0));
  CHECK(v.back() == cplx(0.0, 0.0));
}

TEST_CASE("closed-form identities") {
  const auto checks = eigenfunction_identities();
  CHECK(checks.size() >= 7);
  for (const IdentityCheck& c : checks) {
    INFO(c.name << " error " << c.abs_error);
    CHECK(c.pass);
  }
}

TEST_CASE("continuum inner product") {
  CHECK(theta_inner_product_exact(-1.5) == doctest::Approx(-0.365683027628002970).epsilon(1e-14));
  CHECK(theta_inner_product_exact(-2.0) == doctest::Approx(-0.204021791236599872).epsilon(1e-14));
  CHECK(theta_inner_product_exact(-5.0) == doctest::Approx(-0.0176002944790528372).epsilon(1e-13));
  for (double mu : {-1.5, -2.0, -5.0}) {
    CHECK(std::abs(theta_inner_product(mu).real() - theta_inner_product_exact(mu)) < 1e-6);
  }
  CHECK_THROWS_AS(theta_inner_product(-1.0), OutOfContinuum);
  CHECK_THROWS_AS(theta_inner_product(0.5), OutOfContinuum);
}

TEST_CASE("resolvent identity") {
  for (cplx z : {cplx(2.0, 0.0), cplx(3.0, 1.0), cplx(0.5, 4.0)}) {
    CHECK(resolvent_identity_residual(z, 0) < 1e-8);
    CHECK(resolvent_identity_residual(z, 2) < 1e-8);
  }
}
