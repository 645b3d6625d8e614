// SPDX-License-Identifier: Apache-2.0

#include "pulsectl/model.hpp"

#include <cmath>
#include <string>

#include "pulsectl/error.hpp"

namespace pulsectl {

namespace {

void require_finite(double value, const char* name) {
  if (!std::isfinite(value)) {
    throw InvalidParameter(std::string(name) + " must be finite");
  }
}

}  // namespace

void ModelParams::validate() const {
  require_finite(u_star, "u_star");
  require_finite(f_val, "f_val");
  require_finite(f_der, "f_der");
  require_finite(to_log_der, "to_log_der");
  require_finite(eps, "eps");
  require_finite(control_slope, "control_slope");
  if (!(u_star > 0.0)) throw InvalidParameter("u_star must be positive");
  if (!(f_val > 0.0)) throw InvalidParameter("f_val must be positive");
  if (!(eps > 0.0)) throw InvalidParameter("eps must be positive");
  if (u_star * to_log_der == 1.0) {
    throw InvalidParameter("degenerate pulse: u_star * to_log_der must differ from 1");
  }
  if (!(control_slope < 1.0)) {
    throw UnstableEssential(
        "essential spectrum is unstable: the control slope l'(0) must satisfy l'(0) < 1");
  }
}

double PowerLawModel::f(double u) const { return phi * std::pow(u, gamma); }

double PowerLawModel::f_prime(double u) const {
  if (gamma == 0.0) return 0.0;
  return gamma * phi * std::pow(u, gamma - 1.0);
}

double PowerLawModel::to(double u) const {
  return std::pow(u_star, 1.0 - delta) * std::pow(u, delta);
}

double PowerLawModel::to_prime(double u) const {
  if (delta == 0.0) return 0.0;
  return delta * std::pow(u_star, 1.0 - delta) * std::pow(u, delta - 1.0);
}

PowerLawModel PowerLawModel::from_params(const ModelParams& params) {
  params.validate();
  PowerLawModel m;
  m.u_star = params.u_star;
  m.gamma = params.f_der * params.u_star / params.f_val;
  m.phi = params.f_val / std::pow(params.u_star, m.gamma);
  m.delta = params.to_log_der * params.u_star;
  return m;
}

ModelParams PowerLawModel::induced_params(double eps, double control_slope) const {
  validate();
  ModelParams p;
  p.u_star = u_star;
  p.f_val = f(u_star);
  p.f_der = f_prime(u_star);
  p.to_log_der = delta / u_star;
  p.eps = eps;
  p.control_slope = control_slope;
  p.validate();
  return p;
}

void PowerLawModel::validate() const {
  require_finite(phi, "phi");
  require_finite(gamma, "gamma");
  require_finite(delta, "delta");
  require_finite(u_star, "u_star");
  if (!(phi > 0.0)) throw InvalidParameter("phi must be positive");
  if (!(u_star > 0.0)) throw InvalidParameter("u_star must be positive");
  if (delta == 1.0) throw InvalidParameter("delta = 1 makes every u a pulse amplitude");
}

double existence_residual(double u, const PowerLawModel& model) {
  if (!(u > 0.0)) throw InvalidParameter("existence_residual needs u > 0");
  const double t = model.to(u);
  return u * u - t * t;
}

double sech2(double y) noexcept {
  const double e = std::exp(-2.0 * std::abs(y));
  return 4.0 * e / ((1.0 + e) * (1.0 + e));
}

PulseSample pulse_profile(const ModelParams& params, double x) {
  return {params.u_star * std::exp(-std::abs(x)),
          1.5 / params.f_val * sech2(x / (2.0 * params.eps))};
}

ReducedCoefficients reduced_coefficients(const ModelParams& params) {
  if (params.f_der == 0.0) {
    throw DegenerateControl(
        "f'(u*) = 0: the Evans equation has no (alpha, beta) form and the pulse is not "
        "controllable by proportional feedback");
  }
  ReducedCoefficients c;
  c.alpha = -6.0 - 3.0 * params.to_log_der * params.f_val / params.f_der;
  c.beta = 3.0 * params.f_val / (params.f_der * params.u_star);
  c.nu = params.nu();
  return c;
}

}  // namespace pulsectl
