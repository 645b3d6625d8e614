// SPDX-License-Identifier: Apache-2.0

#include "pulsectl/pde_sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "banded.hpp"
#include "pulsectl/error.hpp"

namespace pulsectl {

namespace {

constexpr double kGrowLimit = 1e6;    // early exit once deviation > kGrowLimit * eta
constexpr double kDecayFloor = 1e-12;  // early exit once deviation < kDecayFloor
constexpr double kFitHigh = 1e2;      // linear regime ends at kFitHigh * d0
constexpr double kFitLow = 1e-6;      // and starts above kFitLow * d0
constexpr double kRelaxTol = 1e-12;
constexpr int kRelaxMaxIter = 60;

bool close_rel(double a, double b) { return std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(b)); }

// Reaction terms and their partial derivatives at one node.
struct Reaction {
  double nu = 0.0;  // -u + f^2 T_o v^2 / (3 eps)
  double nv = 0.0;  // -v + f v^2
  double nu_u = 0.0, nu_v = 0.0, nv_u = 0.0, nv_v = 0.0;
};

}  // namespace

std::string to_string(PerturbationShape s) { return s == PerturbationShape::Random ? "Random" : "EvenBump"; }

PerturbationShape perturbation_shape_from_string(const std::string& s) {
  if (s == "EvenBump") return PerturbationShape::EvenBump;
  if (s == "Random") return PerturbationShape::Random;
  throw InvalidParameter("unknown perturbation shape: " + s);
}

std::string to_string(SimExit e) {
  switch (e) {
    case SimExit::Grew:
      return "Grew";
    case SimExit::Decayed:
      return "Decayed";
    case SimExit::ReachedEnd:
      return "ReachedEnd";
  }
  return "ReachedEnd";
}

SimConfig SimConfig::from_params(const ModelParams& params) {
  SimConfig c;
  c.params = params;
  c.model = PowerLawModel::from_params(params);
  return c;
}

std::size_t SimConfig::half_intervals() const {
  const double h = dx > 0.0 ? dx : params.eps / 4.0;
  return static_cast<std::size_t>(std::ceil(half_length / h - 1e-9));
}

double SimConfig::grid_dx() const { return half_length / static_cast<double>(half_intervals()); }

double SimConfig::grid_dt() const { return dt > 0.0 ? dt : params.eps / 40.0; }

double SimConfig::x(std::size_t k) const {
  return -half_length + grid_dx() * static_cast<double>(k);
}

std::size_t SimConfig::recording_stride() const {
  if (record_every > 0) return record_every;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(0.01 / grid_dt())));
}

void SimConfig::validate() const {
  params.validate();
  model.validate();
  if (!(half_length > 0.0) || !std::isfinite(half_length)) {
    throw InvalidParameter("half_length must be positive");
  }
  if (dx < 0.0 || dt < 0.0 || !std::isfinite(dx) || !std::isfinite(dt)) {
    throw InvalidParameter("dx and dt must be non-negative (0 selects the default)");
  }
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw InvalidParameter("t_end must be positive");
  if (!std::isfinite(eta) || eta < 0.0) throw InvalidParameter("eta must be finite and non-negative");
  if (grid_dx() > params.eps / 4.0 * (1.0 + 1e-12)) {
    throw InvalidParameter("dx must not exceed eps / 4");
  }
  if (!(1.5 / params.f_val * sech2(half_length / (2.0 * params.eps)) < 1e-12) ||
      !(std::exp(-half_length) < 1e-4)) {
    throw InvalidParameter("domain too short: the pulse is not negligible at x = +-L");
  }
  const ModelParams induced = model.induced_params(params.eps, params.control_slope);
  if (!close_rel(induced.u_star, params.u_star) || !close_rel(induced.f_val, params.f_val) ||
      !close_rel(induced.f_der, params.f_der) || !close_rel(induced.to_log_der, params.to_log_der)) {
    throw InvalidParameter("model functions do not reproduce params at u*");
  }
}

double deviation_norm(const SimState& a, const SimState& b, double eps, double dx) {
  double sum = 0.0;
  for (std::size_t k = 0; k < a.u.size(); ++k) {
    const double du = a.u[k] - b.u[k];
    const double dv = a.v[k] - b.v[k];
    sum += du * du + eps * dv * dv;
  }
  return std::sqrt(sum * dx);
}

GrowthFit fit_growth(const std::vector<double>& times, const std::vector<double>& norms, double lo,
                     double hi) {
  GrowthFit fit;
  // Longest contiguous run inside the band.
  std::size_t best_begin = 0, best_len = 0;
  for (std::size_t i = 0; i < norms.size();) {
    if (!(norms[i] >= lo && norms[i] <= hi && norms[i] > 0.0)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < norms.size() && norms[j] >= lo && norms[j] <= hi && norms[j] > 0.0) ++j;
    if (j - i > best_len) {
      best_begin = i;
      best_len = j - i;
    }
    i = j;
  }
  if (best_len < 4) return fit;
  const double t0 = times[best_begin];
  const double t1 = times[best_begin + best_len - 1];
  const double cut = t0 + 0.25 * (t1 - t0);
  std::size_t first = best_begin;
  while (times[first] < cut) ++first;
  const std::size_t last = best_begin + best_len;
  if (last - first < 3) return fit;

  // A complex mode makes the norm oscillate about its exponential envelope;
  // the local maxima trace that envelope.
  std::vector<std::size_t> idx;
  for (std::size_t i = first + 1; i + 1 < last; ++i) {
    if (norms[i] > norms[i - 1] && norms[i] >= norms[i + 1]) idx.push_back(i);
  }
  if (idx.size() < 4) {
    idx.clear();
    for (std::size_t i = first; i < last; ++i) idx.push_back(i);
  }
  double n = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t i : idx) {
    n += 1.0;
    sx += times[i];
    sy += std::log(norms[i]);
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i : idx) {
    const double dx = times[i] - mx;
    const double dy = std::log(norms[i]) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) return fit;
  fit.rate = sxy / sxx;
  fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  fit.t_begin = times[idx.front()];
  fit.t_end = times[idx.back()];
  fit.samples = idx.size();
  return fit;
}

namespace {

Reaction reaction(const PowerLawModel& m, double log_prefactor, double eps, double u, double v,
                  double time) {
  if (!(u > 0.0) || !std::isfinite(u) || !std::isfinite(v)) {
    throw NumericalBlowup(time, "state left the model domain (u <= 0 or non-finite)");
  }
  const double lu = std::log(u);
  const double f = m.phi * std::exp(m.gamma * lu);
  const double g = std::exp(log_prefactor + (2.0 * m.gamma + m.delta) * lu);  // f^2 T_o
  Reaction r;
  const double c = 1.0 / (3.0 * eps);
  r.nu = -u + c * g * v * v;
  r.nv = -v + f * v * v;
  r.nu_u = -1.0 + c * (2.0 * m.gamma + m.delta) * g / u * v * v;
  r.nu_v = 2.0 * c * g * v;
  r.nv_u = m.gamma * f / u * v * v;
  r.nv_v = -1.0 + 2.0 * f * v;
  return r;
}

// Second difference with reflecting ends.
double laplacian(const std::vector<double>& w, std::size_t k, double inv_h2) {
  const std::size_t n = w.size();
  if (k == 0) return 2.0 * (w[1] - w[0]) * inv_h2;
  if (k + 1 == n) return 2.0 * (w[n - 2] - w[n - 1]) * inv_h2;
  return (w[k - 1] - 2.0 * w[k] + w[k + 1]) * inv_h2;
}

std::shared_ptr<const detail::TridiagonalFactor> implicit_diffusion(std::size_t n, double coeff) {
  std::vector<double> lower(n, -coeff), diag(n, 1.0 + 2.0 * coeff), upper(n, -coeff);
  lower[0] = 0.0;
  upper[n - 1] = 0.0;
  upper[0] = -2.0 * coeff;
  lower[n - 1] = -2.0 * coeff;
  return std::make_shared<const detail::TridiagonalFactor>(std::move(lower), std::move(diag),
                                                           std::move(upper));
}

}  // namespace

PulseSimulation::PulseSimulation(SimConfig config) : config_(std::move(config)) {
  config_.validate();
  dx_ = config_.grid_dx();
  dt_ = config_.grid_dt();
  n_ = config_.nodes();
  const PowerLawModel& m = config_.model;
  log_prefactor_ = 2.0 * std::log(m.phi) + (1.0 - m.delta) * std::log(m.u_star);
  relax();
  const double inv_h2 = 1.0 / (dx_ * dx_);
  implicit_u_ = implicit_diffusion(n_, dt_ * inv_h2);
  implicit_v_ = implicit_diffusion(n_, dt_ * config_.params.eps * config_.params.eps * inv_h2);
}

SimState PulseSimulation::leading_order() const {
  SimState s;
  s.u.resize(n_);
  s.v.resize(n_);
  for (std::size_t k = 0; k < n_; ++k) {
    const PulseSample p = pulse_profile(config_.params, config_.x(k));
    s.u[k] = p.u;
    s.v[k] = p.v;
  }
  return s;
}

// Newton on the even half [0, L]; the odd translation mode is excluded there,
// so the Jacobian stays regular.
void PulseSimulation::relax() {
  const std::size_t mh = config_.half_intervals();
  const std::size_t nh = mh + 1;
  const double eps = config_.params.eps;
  const double inv_h2 = 1.0 / (dx_ * dx_);
  const SimState lo = leading_order();
  std::vector<double> u(nh), v(nh);
  for (std::size_t i = 0; i < nh; ++i) {
    u[i] = lo.u[mh + i];
    v[i] = lo.v[mh + i];
  }

  auto residual = [&](std::vector<double>& fu, std::vector<double>& fv) {
    double worst = 0.0;
    for (std::size_t i = 0; i < nh; ++i) {
      const Reaction r = reaction(config_.model, log_prefactor_, eps, u[i], v[i], 0.0);
      fu[i] = laplacian(u, i, inv_h2) + r.nu;
      fv[i] = eps * eps * laplacian(v, i, inv_h2) + r.nv;
      worst = std::max({worst, std::abs(fu[i]), std::abs(fv[i])});
    }
    return worst;
  };

  std::vector<double> fu(nh), fv(nh);
  bool converged = false;
  int it = 0;
  for (; it < kRelaxMaxIter; ++it) {
    residual(fu, fv);
    detail::BandedMatrix<double> jac(2 * nh, 2, 2);
    std::vector<double> rhs(2 * nh);
    for (std::size_t i = 0; i < nh; ++i) {
      const Reaction r = reaction(config_.model, log_prefactor_, eps, u[i], v[i], 0.0);
      const std::size_t iu = 2 * i, iv = 2 * i + 1;
      const double cu = inv_h2, cv = eps * eps * inv_h2;
      jac(iu, iu) = -2.0 * cu + r.nu_u;
      jac(iu, iv) = r.nu_v;
      jac(iv, iu) = r.nv_u;
      jac(iv, iv) = -2.0 * cv + r.nv_v;
      if (i == 0) {
        jac(iu, iu + 2) = 2.0 * cu;
        jac(iv, iv + 2) = 2.0 * cv;
      } else if (i + 1 == nh) {
        jac(iu, iu - 2) = 2.0 * cu;
        jac(iv, iv - 2) = 2.0 * cv;
      } else {
        jac(iu, iu - 2) = cu;
        jac(iu, iu + 2) = cu;
        jac(iv, iv - 2) = cv;
        jac(iv, iv + 2) = cv;
      }
      rhs[iu] = -fu[i];
      rhs[iv] = -fv[i];
    }
    if (jac.factorize() < 1e-15) throw RelaxationFailure("singular Jacobian while refining the pulse");
    jac.solve(rhs);
    double step = 0.0;
    for (std::size_t i = 0; i < nh; ++i) {
      u[i] += rhs[2 * i];
      v[i] += rhs[2 * i + 1];
      step = std::max({step, std::abs(rhs[2 * i]), std::abs(rhs[2 * i + 1])});
    }
    if (!std::isfinite(step)) throw RelaxationFailure("Newton refinement diverged");
    if (step <= kRelaxTol) {
      converged = true;
      ++it;
      break;
    }
  }
  if (!converged) throw RelaxationFailure("Newton refinement did not reach 1e-12");
  relax_iterations_ = it;

  reference_.u.resize(n_);
  reference_.v.resize(n_);
  for (std::size_t k = 0; k < n_; ++k) {
    const std::size_t i = k >= mh ? k - mh : mh - k;
    reference_.u[k] = u[i];
    reference_.v[k] = v[i];
  }
  relax_residual_ = residual(fu, fv);
}

SimState PulseSimulation::rhs(const SimState& s) const {
  const double eps = config_.params.eps;
  const double gain = config_.params.control_slope;
  const double inv_h2 = 1.0 / (dx_ * dx_);
  SimState out;
  out.u.resize(n_);
  out.v.resize(n_);
  for (std::size_t k = 0; k < n_; ++k) {
    const Reaction r = reaction(config_.model, log_prefactor_, eps, s.u[k], s.v[k], 0.0);
    out.u[k] = laplacian(s.u, k, inv_h2) + r.nu;
    out.v[k] = eps * eps * laplacian(s.v, k, inv_h2) + r.nv + gain * (s.v[k] - reference_.v[k]);
  }
  return out;
}

std::vector<double> PulseSimulation::control_term(const SimState& s) const {
  std::vector<double> c(n_);
  for (std::size_t k = 0; k < n_; ++k) {
    c[k] = config_.params.control_slope * (s.v[k] - reference_.v[k]);
  }
  return c;
}

void PulseSimulation::step(SimState& s, double t) const {
  const double eps = config_.params.eps;
  const double gain = config_.params.control_slope;
  for (std::size_t k = 0; k < n_; ++k) {
    const Reaction r = reaction(config_.model, log_prefactor_, eps, s.u[k], s.v[k], t);
    s.u[k] += dt_ * r.nu;
    s.v[k] += dt_ * (r.nv + gain * (s.v[k] - reference_.v[k]));
  }
  implicit_u_->solve(s.u);
  implicit_v_->solve(s.v);
  for (std::size_t k = 0; k < n_; ++k) {
    if (!std::isfinite(s.u[k]) || !std::isfinite(s.v[k])) {
      throw NumericalBlowup(t, "non-finite state after an IMEX step");
    }
  }
}

SimState PulseSimulation::perturbed() const {
  SimState s = reference_;
  const double eps = config_.params.eps;
  std::mt19937_64 rng(config_.seed);
  // Uniform on [-1, 1) from the top 53 bits, identical on every platform.
  auto uniform = [&rng] { return 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0; };
  for (std::size_t k = 0; k < n_; ++k) {
    const double x = config_.x(k);
    double au = 1.0, av = 1.0;
    if (config_.shape == PerturbationShape::Random) {
      au = uniform();
      av = uniform();
    }
    s.u[k] += config_.eta * au * std::exp(-x * x);
    s.v[k] += config_.eta * av * sech2(x / (2.0 * eps));
  }
  return s;
}

double PulseSimulation::deviation(const SimState& s) const {
  return deviation_norm(s, reference_, config_.params.eps, dx_);
}

SimTrace PulseSimulation::run() const {
  SimTrace trace;
  trace.relaxation_residual = relax_residual_;
  trace.relaxation_iterations = relax_iterations_;
  SimState s = perturbed();
  const double d0 = deviation(s);
  trace.times.push_back(0.0);
  trace.deviation_norms.push_back(d0);

  const std::size_t stride = config_.recording_stride();
  const auto steps = static_cast<std::size_t>(std::ceil(config_.t_end / dt_ - 1e-9));
  for (std::size_t n = 1; n <= steps; ++n) {
    const double t_prev = dt_ * static_cast<double>(n - 1);
    step(s, t_prev);
    // Exit tests run every step: past the linear regime the explicit
    // reaction can overflow within one recording stride.
    const double d = deviation(s);
    const bool grew = d > kGrowLimit * config_.eta;
    const bool decayed = d < kDecayFloor;
    if (n % stride != 0 && n != steps && !grew && !decayed) continue;
    trace.times.push_back(dt_ * static_cast<double>(n));
    trace.deviation_norms.push_back(d);
    if (grew) {
      trace.exit = SimExit::Grew;
      break;
    }
    if (decayed) {
      trace.exit = SimExit::Decayed;
      break;
    }
  }
  if (d0 > 0.0) {
    const GrowthFit fit = fit_growth(trace.times, trace.deviation_norms, kFitLow * d0, kFitHigh * d0);
    trace.fitted_rate = fit.rate;
    trace.fit_r2 = fit.r2;
    trace.fit_t_begin = fit.t_begin;
    trace.fit_t_end = fit.t_end;
  }
  return trace;
}

SimTrace run(const SimConfig& config) { return PulseSimulation(config).run(); }

}  // namespace pulsectl
