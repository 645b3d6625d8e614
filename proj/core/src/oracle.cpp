// SPDX-License-Identifier: Apache-2.0

#include "pulsectl/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <tuple>

#include <boost/numeric/odeint.hpp>

#include "banded.hpp"
#include "pulsectl/error.hpp"
#include "pulsectl/model.hpp"

namespace pulsectl {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kResonance = 1e-6;
constexpr std::array<double, 3> kBoundStates = {1.25, 0.0, -0.75};

double potential(double xi) { return -1.0 + 3.0 * sech2(0.5 * xi); }

double psi0(double xi) {
  const double s = std::sqrt(sech2(0.5 * xi));
  return 0.25 * std::sqrt(7.5) * s * s * s;
}

double psi1(double xi) { return 0.5 * std::sqrt(7.5) * sech2(0.5 * xi) * std::tanh(0.5 * xi); }

double psi2(double xi) {
  const double s = std::sqrt(sech2(0.5 * xi));
  // (-3 + 2 cosh xi) sech^3(xi/2) = 4 sech(xi/2) - 5 sech^3(xi/2), finite for large |xi|.
  return 0.25 * std::sqrt(1.5) * (4.0 * s - 5.0 * s * s * s);
}

double bound_state(int mode, double xi) {
  switch (mode) {
    case 0:
      return psi0(xi);
    case 1:
      return psi1(xi);
    default:
      return psi2(xi);
  }
}

// Number of eigenvalues of the symmetric tridiagonal matrix strictly below x.
std::size_t count_below(const FastOperator& op, double x) {
  std::size_t count = 0;
  double d = 1.0;
  const double b2 = op.off * op.off;
  for (std::size_t i = 0; i < op.diag.size(); ++i) {
    d = (op.diag[i] - x) - (i > 0 ? b2 / d : 0.0);
    if (d == 0.0) d = -1e-300;
    if (d < 0.0) ++count;
  }
  return count;
}

// Top three discrete eigenvalues per grid, shared by every solve on that grid.
const std::vector<double>& cached_top(const FastGrid& grid) {
  static std::mutex mu;
  static std::map<std::tuple<double, double, std::size_t>, std::vector<double>> cache;
  const auto key = std::make_tuple(grid.xi_min, grid.xi_max, grid.n);
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto vals = top_eigenvalues(FastOperator::build(grid), 3);
  return cache.emplace(key, std::move(vals)).first->second;
}

FastGrid refined(const FastGrid& g) { return {g.xi_min, g.xi_max, 2 * g.n - 1}; }

template <class F>
double trapezoid(const FastGrid& grid, F&& f) {
  const double h = grid.h();
  double sum = 0.5 * (f(grid.xi(0)) + f(grid.xi(grid.n - 1)));
  for (std::size_t i = 1; i + 1 < grid.n; ++i) sum += f(grid.xi(i));
  return sum * h;
}

IdentityCheck make_check(std::string name, double computed, double reference, double tol) {
  IdentityCheck c;
  c.name = std::move(name);
  c.computed = computed;
  c.reference = reference;
  c.abs_error = std::abs(computed - reference);
  c.tolerance = tol;
  c.pass = c.abs_error <= tol;
  return c;
}

}  // namespace

void FastGrid::validate() const {
  if (n < 3) throw InvalidParameter("fast grid needs at least three nodes");
  if (!(xi_max > 0.0) || xi_min != -xi_max) {
    throw InvalidParameter("fast grid must be symmetric about xi = 0");
  }
  if (!(fast_pulse(xi_max) < 1e-15)) {
    throw InvalidParameter("fast grid too short: v_p at the boundary exceeds 1e-15");
  }
}

double fast_pulse(double xi) { return 1.5 * sech2(0.5 * xi); }

FastOperator FastOperator::build(const FastGrid& grid) {
  grid.validate();
  FastOperator op;
  op.grid = grid;
  const double h = grid.h();
  const double inv_h2 = 1.0 / (h * h);
  op.off = inv_h2;
  op.diag.resize(grid.n - 2);
  for (std::size_t i = 1; i + 1 < grid.n; ++i) {
    op.diag[i - 1] = -2.0 * inv_h2 + potential(grid.xi(i));
  }
  return op;
}

std::vector<double> top_eigenvalues(const FastOperator& op, std::size_t k) {
  const std::size_t m = op.size();
  k = std::min(k, m);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double d : op.diag) {
    lo = std::min(lo, d - 2.0 * std::abs(op.off));
    hi = std::max(hi, d + 2.0 * std::abs(op.off));
  }
  std::vector<double> out;
  for (std::size_t j = 0; j < k; ++j) {
    // The (j+1)-th largest eigenvalue is the (m - j)-th smallest.
    const std::size_t target = m - j;
    double a = lo;
    double b = hi;
    for (int it = 0; it < 200 && b - a > 1e-14 * std::max(1.0, std::abs(a)); ++it) {
      const double mid = 0.5 * (a + b);
      if (count_below(op, mid) >= target) {
        b = mid;
      } else {
        a = mid;
      }
    }
    out.push_back(0.5 * (a + b));
  }
  return out;
}

std::vector<cplx> solve_vin(cplx z, const FastGrid& grid) {
  grid.validate();
  const auto& top = cached_top(grid);
  for (std::size_t i = 0; i < top.size(); ++i) {
    if (std::abs(z - top[i]) < kResonance || std::abs(z - kBoundStates[i]) < kResonance) {
      throw NearEigenvalue("spectral parameter resonates with a bound state of L_f");
    }
  }
  const std::size_t m = grid.n - 2;
  const double h = grid.h();
  const double inv_h2 = 1.0 / (h * h);
  detail::BandedMatrix<cplx> a(m, 1, 1);
  std::vector<cplx> rhs(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double xi = grid.xi(i + 1);
    a(i, i) = -2.0 * inv_h2 + potential(xi) - z;
    if (i > 0) a(i, i - 1) = inv_h2;
    if (i + 1 < m) a(i, i + 1) = inv_h2;
    const double vp = fast_pulse(xi);
    rhs[i] = -vp * vp;
  }
  if (a.factorize() < 1e-14) {
    throw NearEigenvalue("discrete operator is numerically singular at this spectral parameter");
  }
  a.solve(rhs);
  std::vector<cplx> v(grid.n, cplx{});
  std::copy(rhs.begin(), rhs.end(), v.begin() + 1);
  return v;
}

cplx r_oracle_raw(cplx z, const FastGrid& grid) {
  const std::vector<cplx> v = solve_vin(z, grid);
  const double h = grid.h();
  cplx sum{};
  for (std::size_t i = 1; i + 1 < grid.n; ++i) sum += v[i] * fast_pulse(grid.xi(i));
  return sum * h;
}

cplx r_oracle(cplx z, const FastGrid& grid) {
  const cplx coarse = r_oracle_raw(z, grid);
  const cplx fine = r_oracle_raw(z, refined(grid));
  return (4.0 * fine - coarse) / 3.0;
}

std::vector<IdentityCheck> eigenfunction_identities(const FastGrid& grid) {
  grid.validate();
  const double s15 = std::sqrt(7.5);
  const double s3 = std::sqrt(1.5);
  auto vp2 = [](double x) {
    const double v = fast_pulse(x);
    return v * v;
  };
  std::vector<IdentityCheck> out;
  out.push_back(make_check("<psi0,v_p>", trapezoid(grid, [](double x) { return psi0(x) * fast_pulse(x); }),
                           9.0 * kPi / 32.0 * s15, 1e-8));
  out.push_back(make_check("<psi2,v_p>", trapezoid(grid, [](double x) { return psi2(x) * fast_pulse(x); }),
                           3.0 * kPi / 32.0 * s3, 1e-8));
  out.push_back(make_check("<v_p^2,psi0>", trapezoid(grid, [&](double x) { return vp2(x) * psi0(x); }),
                           45.0 * kPi / 128.0 * s15, 1e-8));
  out.push_back(make_check("<v_p^2,psi2>", trapezoid(grid, [&](double x) { return vp2(x) * psi2(x); }),
                           -9.0 * kPi / 128.0 * s3, 1e-8));
  for (int mode = 0; mode < 3; ++mode) {
    const double norm2 = trapezoid(grid, [mode](double x) {
      const double p = bound_state(mode, x);
      return p * p;
    });
    out.push_back(make_check("||psi" + std::to_string(mode) + "||", std::sqrt(norm2), 1.0, 1e-10));
  }
  out.push_back(make_check("<psi1,v_p>", trapezoid(grid, [](double x) { return psi1(x) * fast_pulse(x); }),
                           0.0, 1e-12));
  return out;
}

cplx theta_inner_product(double mu_hat, const FastGrid& grid) {
  if (!(mu_hat < -1.0)) throw OutOfContinuum("theta is defined for mu < -1 only");
  grid.validate();
  using State = std::array<double, 2>;
  auto rhs = [mu_hat](const State& y, State& dy, double xi) {
    dy[0] = y[1];
    dy[1] = (1.0 + mu_hat - 3.0 * sech2(0.5 * xi)) * y[0];
  };
  const double h = grid.h();
  const std::size_t half = (grid.n - 1) / 2;
  State y = {1.0, 0.0};
  boost::numeric::odeint::runge_kutta4<State> stepper;
  // theta is even, so integrate over [0, xi_max] and double, counting xi = 0 once.
  double sum = 0.5 * y[0] * fast_pulse(0.0);
  double xi = 0.0;
  for (std::size_t i = 1; i <= half; ++i) {
    stepper.do_step(rhs, y, xi, h);
    xi = h * static_cast<double>(i);
    const double w = (i == half) ? 0.5 : 1.0;
    sum += w * y[0] * fast_pulse(xi);
  }
  return {2.0 * h * sum, 0.0};
}

double theta_inner_product_exact(double mu_hat) {
  if (!(mu_hat < -1.0)) throw OutOfContinuum("theta is defined for mu < -1 only");
  const double k = std::sqrt(-1.0 - mu_hat);
  return -0.75 * kPi * k / std::sinh(kPi * k);
}

double resolvent_identity_residual(cplx z, int mode, const FastGrid& grid) {
  if (mode != 0 && mode != 2) throw InvalidParameter("resolvent identity is checked for modes 0 and 2");
  const double zi = kBoundStates[static_cast<std::size_t>(mode)];
  auto project = [&](const FastGrid& g) {
    const std::vector<cplx> v = solve_vin(z, g);
    cplx s{};
    for (std::size_t i = 1; i + 1 < g.n; ++i) s += v[i] * bound_state(mode, g.xi(i));
    return s * g.h();
  };
  const cplx projection = (4.0 * project(refined(grid)) - project(grid)) / 3.0;
  const double lhs_value = trapezoid(grid, [mode](double x) {
    const double v = fast_pulse(x);
    return v * v * bound_state(mode, x);
  });
  return std::abs(lhs_value - (z - zi) * projection);
}

}  // namespace pulsectl
