#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>

#include "pulsectl/error.hpp"
#include "pulsectl/spectral.hpp"

using namespace pulsectl;

namespace {

// Reference values from 30-digit quadrature of the closed form.
void check_close(cplx got, cplx want, double tol) {
  INFO("got " << got << " want " << want);
  CHECK(std::abs(got - want) <= tol);
}

ModelParams reference_example(double gain) {
  ModelParams p;
  p.f_der = -3.0;
  p.to_log_der = 8.0;
  p.control_slope = gain;
  return p;
}

}  // namespace

TEST_CASE("closed form against high-precision references") {
  check_close(r_total(2.0).total, 9.71721667161094305, 1e-12);
  check_close(r_continuous(2.0).value, -0.00606103070516247, 1e-12);
  check_close(r_discrete(2.0), 9.72327770231610552, 1e-12);
  check_close(r_total(3.0).total, 4.15159309826334029, 1e-12);
  check_close(r_total({3.0, 1.0}).total, {3.12404810375026090, -1.79414337855771215}, 1e-12);
  check_close(r_total({0.5, 4.0}).total, {-0.340524336142874928, -1.74121041268931787}, 1e-12);
  check_close(r_total({1.0, 2.0}).total, {-0.479708836956813107, -3.57148435772968801}, 1e-12);
  check_close(r_continuous(0.0).value, -0.0146246747299885720, 1e-12);
  check_close(r_total(0.0).total, -6.0, 1e-10);
}

TEST_CASE("R is real on the real axis and conjugate-symmetric") {
  const cplx z(0.7, 3.3);
  check_close(r_total(std::conj(z)).total, std::conj(r_total(z).total), 1e-13);
  CHECK(r_total(7.5).total.imag() == doctest::Approx(0.0));
}

TEST_CASE("derivative agrees with a centred difference") {
  const cplx z(1.7, 0.8);
  const double h = 1e-5;
  const cplx fd = (r_total(z + h).total - r_total(z - h).total) / (2.0 * h);
  check_close(r_total_derivative(z), fd, 1e-7);
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(r_discrete(kPoleHigh), PoleAtInput);
  CHECK_THROWS_AS(r_discrete(kPoleLow), PoleAtInput);
  CHECK_THROWS_AS(r_continuous(-1.0), EssentialRay);
  CHECK_THROWS_AS(r_continuous(-3.0), EssentialRay);
  CHECK_NOTHROW(r_continuous({-3.0, 1e-3}));
  ReducedCoefficients c{2.0, -1.0, 2.0};
  CHECK_THROWS_AS(lhs(-2.0, c, 0.0), BranchCut);
  check_close(lhs(3.0, c, 0.0), 2.0 - 2.0, 1e-15);
  CHECK_THROWS_AS(essential_edges(1.0), UnstableEssential);
}

TEST_CASE("essential edges") {
  const EssentialEdges free = essential_edges(0.0);
  CHECK(free.edge_lambda == -1.0);
  CHECK(free.edge_lambda_hat == -1.0);
  const EssentialEdges ctrl = essential_edges(-3.0);
  CHECK(ctrl.edge_lambda == -1.0);
  CHECK(ctrl.edge_lambda_hat == 2.0);
  CHECK(essential_edges(0.5).edge_lambda == 0.5 - 1.0);
}

TEST_CASE("uncontrolled example spectrum") {
  const SpectrumReport r = assemble_spectrum(reference_example(0.0));
  CHECK(r.verdict == Verdict::Unstable);
  CHECK(r.max_real_part == doctest::Approx(1.2423052749).epsilon(1e-8));
  const bool has_pair = std::any_of(r.eigenvalues.begin(), r.eigenvalues.end(), [](cplx l) {
    return std::abs(l - cplx(1.2423052749, 5.3853979022)) < 1e-8;
  });
  CHECK(has_pair);
  const bool has_real = std::any_of(r.eigenvalues.begin(), r.eigenvalues.end(),
                                    [](cplx l) { return std::abs(l - (-0.7688352029)) < 1e-8; });
  CHECK(has_real);
  CHECK(r.translation_eigenvalue == cplx(0.0, 0.0));
  CHECK(stability_verdict(reference_example(0.0)) == Verdict::Unstable);
}

TEST_CASE("controlled example spectrum") {
  const SpectrumReport r = assemble_spectrum(reference_example(-3.0));
  CHECK(r.verdict == Verdict::Stable);
  CHECK(r.max_real_part == doctest::Approx(-0.4803738487).epsilon(1e-8));
  CHECK(r.translation_eigenvalue == cplx(-3.0, 0.0));
  CHECK(r.essential_edge == -1.0);
  for (cplx l : r.eigenvalues) CHECK(l.real() < 0.0);
  CHECK(stability_verdict(reference_example(-3.0)) == Verdict::Stable);
}

TEST_CASE("root finders agree with each other") {
  const ReducedCoefficients c = reduced_coefficients(reference_example(0.0));
  const Rect w = default_search_window(c, 0.0);
  RootDiagnostics d;
  const auto roots = find_complex_roots(c, 0.0, w, &d);
  CHECK(static_cast<int>(roots.size()) == count_roots(c, 0.0, w));
  CHECK(d.function_evaluations > 0);
  for (cplx z : roots) {
    CHECK(w.contains(z));
    CHECK(std::abs(lhs(z, c, 0.0) - r_total(z).total) < 1e-9);
  }
  // Closed under conjugation.
  for (cplx z : roots) {
    const bool found = std::any_of(roots.begin(), roots.end(),
                                   [&](cplx y) { return std::abs(y - std::conj(z)) < 1e-9; });
    CHECK(found);
  }
}

TEST_CASE("real roots for beta > 0 and alpha <= 0") {
  const ReducedCoefficients c{-2.0, 1.5, 2.0 / 1.5};
  const Rect w = default_search_window(c, 0.0);
  const auto real = find_real_roots(c, 0.0, {kPoleHigh, w.re_max});
  REQUIRE_FALSE(real.empty());
  CHECK(real.back() > kPoleHigh);
  CHECK(std::abs(lhs(real.back(), c, 0.0) - r_total(real.back()).total) < 1e-10);
  for (cplx z : find_complex_roots(c, 0.0, w)) CHECK(std::abs(z.imag()) < 1e-8);
}

TEST_CASE("verdict names round trip") {
  for (Verdict v : {Verdict::Stable, Verdict::NeutrallyStable, Verdict::Unstable}) {
    CHECK(verdict_from_string(to_string(v)) == v);
  }
  CHECK_THROWS(verdict_from_string("bogus"));
}

TEST_CASE("worked root examples") {
  auto largest_real = [](ReducedCoefficients c, double gain) {
    const Rect w = default_search_window(c, gain);
    const auto roots = find_real_roots(c, gain, {w.re_min, w.re_max});
    return roots.empty() ? -1e300 : roots.back();
  };
  CHECK(largest_real({0.0, 1.0, 0.0}, 0.0) > kPoleHigh);
  CHECK(largest_real({-5.0, 1.0, 5.0}, 0.0) > 24.0);

  const ReducedCoefficients strong{2.0, 1.0, -2.0};
  CHECK(find_complex_roots(strong, -20.0, default_search_window(strong, -20.0)).empty());

  const ReducedCoefficients neg{2.0, -1.0, 2.0};
  for (cplx z : find_complex_roots(neg, 0.0, default_search_window(neg, 0.0))) CHECK(z.real() < 1.28);
}

TEST_CASE("no cancellation when f' = 0") {
  ModelParams p;
  p.to_log_der = 0.5;
  p.control_slope = 0.9;
  const SpectrumReport r = assemble_spectrum(p);
  CHECK(r.verdict == Verdict::Unstable);
  const bool has = std::any_of(r.eigenvalues.begin(), r.eigenvalues.end(),
                               [](cplx l) { return std::abs(l - 2.15) < 1e-12; });
  CHECK(has);
}
