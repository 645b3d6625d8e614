// SPDX-License-Identifier: Apache-2.0

#include "pulsectl/spectral.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "evans.hpp"
#include "pulsectl/error.hpp"

namespace pulsectl {

namespace detail {

namespace {

constexpr double kPi = 3.141592653589793;
constexpr int kBasePanels = 24;
constexpr int kNodes = 15;
constexpr int kMaxPanels = 4000;

// Spectral weight of the continuum, kappa^4 (1+kappa^2)^2 csch^2(pi kappa)
// / ((kappa^2 + 9/4)(kappa^2 + 1/4)), written to stay finite at kappa -> 0.
double continuum_weight(double k) {
  const double t = kPi * k;
  const double ratio = t < 1e-8 ? 1.0 : t / std::sinh(t);
  const double k2 = k * k;
  return k2 * ratio * ratio / (kPi * kPi) * (1.0 + k2) * (1.0 + k2) /
         ((k2 + 2.25) * (k2 + 0.25));
}

struct RuleNode {
  double offset;  // in [-1, 1]
  double wk;      // Kronrod weight
  double wg;      // Gauss weight, zero off the Gauss subset
};

const std::array<RuleNode, kNodes>& rule() {
  static const std::array<RuleNode, kNodes> nodes = [] {
    using boost::math::quadrature::gauss;
    using boost::math::quadrature::gauss_kronrod;
    const auto& xk = gauss_kronrod<double, 15>::abscissa();
    const auto& wk = gauss_kronrod<double, 15>::weights();
    const auto& wg = gauss<double, 7>::weights();
    std::array<RuleNode, kNodes> out{};
    out[0] = {0.0, wk[0], wg[0]};
    for (int i = 1; i < 8; ++i) {
      const double g = (i % 2 == 0) ? wg[static_cast<std::size_t>(i / 2)] : 0.0;
      out[static_cast<std::size_t>(2 * i - 1)] = {-xk[static_cast<std::size_t>(i)], wk[static_cast<std::size_t>(i)], g};
      out[static_cast<std::size_t>(2 * i)] = {xk[static_cast<std::size_t>(i)], wk[static_cast<std::size_t>(i)], g};
    }
    return out;
  }();
  return nodes;
}

// Node data for one panel: 1 + kappa^2 and the weighted spectral density.
struct PanelNodes {
  std::array<double, kNodes> shift;
  std::array<double, kNodes> wk;
  std::array<double, kNodes> wg;
};

PanelNodes make_panel(double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  PanelNodes p{};
  const auto& r = rule();
  for (std::size_t i = 0; i < kNodes; ++i) {
    const double k = c + h * r[i].offset;
    const double w = continuum_weight(k);
    p.shift[i] = 1.0 + k * k;
    p.wk[i] = h * r[i].wk * w;
    p.wg[i] = h * r[i].wg * w;
  }
  return p;
}

const std::vector<PanelNodes>& base_panels() {
  static const std::vector<PanelNodes> panels = [] {
    std::vector<PanelNodes> out;
    const double width = kKappaMax / kBasePanels;
    for (int i = 0; i < kBasePanels; ++i) out.push_back(make_panel(i * width, (i + 1) * width));
    return out;
  }();
  return panels;
}

struct PanelResult {
  double a = 0.0, b = 0.0;
  cplx k1, g1, k2;
  double err = 0.0;
  bool operator<(const PanelResult& o) const { return err < o.err; }
};

PanelResult apply_panel(const PanelNodes& p, cplx z, double a, double b) {
  PanelResult r;
  r.a = a;
  r.b = b;
  const double zr = z.real();
  const double zi = z.imag();
  double k1r = 0, k1i = 0, g1r = 0, g1i = 0, k2r = 0, k2i = 0;
  for (std::size_t i = 0; i < kNodes; ++i) {
    // 1 / (z + 1 + k^2) by hand; std::complex division is much slower.
    const double dr = zr + p.shift[i];
    const double den = dr * dr + zi * zi;
    const double ir = dr / den;
    const double ii = -zi / den;
    k1r += p.wk[i] * ir;
    k1i += p.wk[i] * ii;
    g1r += p.wg[i] * ir;
    g1i += p.wg[i] * ii;
    const double sr = ir * ir - ii * ii;
    const double si = 2.0 * ir * ii;
    k2r += p.wk[i] * sr;
    k2i += p.wk[i] * si;
  }
  r.k1 = {k1r, k1i};
  r.g1 = {g1r, g1i};
  r.k2 = {k2r, k2i};
  r.err = std::abs(r.k1 - r.g1);
  return r;
}

// Bound for int_{kmax}^inf |w / (z + 1 + k^2)| dk using
// csch^2(pi k) <= 4.01 e^{-2 pi k} for k >= 1.
double tail_bound(cplx z) {
  const double k0 = kKappaMax;
  const double lead = (1.0 + k0 * k0) * (1.0 + k0 * k0);
  const double rate = 2.0 * kPi - 4.0 * k0 / (1.0 + k0 * k0);
  const double mass = 4.01 * lead * std::exp(-2.0 * kPi * k0) / rate;
  const double shifted = z.real() + 1.0 + k0 * k0;
  const double dist = shifted >= 0.0 ? std::abs(cplx(shifted, z.imag())) : std::abs(z.imag());
  return dist > 0.0 ? mass / dist : std::numeric_limits<double>::infinity();
}

}  // namespace

ContinuumSums continuum_integrals(cplx z, double abs_tol) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw InvalidParameter("spectral parameter must be finite");
  }
  if (z.imag() == 0.0 && z.real() <= -1.0) {
    throw EssentialRay("spectral parameter lies on the essential ray (real part <= -1)");
  }
  const double tail = tail_bound(z);
  const auto& base = base_panels();
  const double width = kKappaMax / kBasePanels;

  std::vector<PanelResult> panels;
  panels.reserve(base.size());
  double err = 0.0;
  for (std::size_t i = 0; i < base.size(); ++i) {
    panels.push_back(apply_panel(base[i], z, static_cast<double>(i) * width,
                                 static_cast<double>(i + 1) * width));
    err += panels.back().err;
  }

  if (err + tail > abs_tol) {
    std::priority_queue<PanelResult> heap(panels.begin(), panels.end());
    int count = static_cast<int>(heap.size());
    while (err + tail > abs_tol && count < kMaxPanels) {
      PanelResult worst = heap.top();
      heap.pop();
      const double mid = 0.5 * (worst.a + worst.b);
      PanelResult left = apply_panel(make_panel(worst.a, mid), z, worst.a, mid);
      PanelResult right = apply_panel(make_panel(mid, worst.b), z, mid, worst.b);
      err += left.err + right.err - worst.err;
      heap.push(left);
      heap.push(right);
      ++count;
      if (count % 256 == 0) {
        // Re-sum occasionally so cancellation in the running total cannot stall the loop.
        auto copy = heap;
        err = 0.0;
        while (!copy.empty()) {
          err += copy.top().err;
          copy.pop();
        }
      }
    }
    panels.clear();
    while (!heap.empty()) {
      panels.push_back(heap.top());
      heap.pop();
    }
    // Deterministic summation order independent of heap layout.
    std::sort(panels.begin(), panels.end(),
              [](const PanelResult& x, const PanelResult& y) { return x.a < y.a; });
    err = 0.0;
    for (const auto& p : panels) err += p.err;
    if (err + tail > abs_tol) {
      throw QuadratureFailure(err + tail,
                              "continuum quadrature did not reach the requested tolerance");
    }
  }

  ContinuumSums out;
  for (const auto& p : panels) {
    out.i1 += p.k1;
    out.i2 += p.k2;
  }
  out.error = err + tail;
  return out;
}

EvansSample EvansFunction::operator()(cplx z) const {
  ++evals_;
  const cplx arg = 1.0 + z + slope_;
  if (arg.imag() == 0.0 && arg.real() <= 0.0) {
    throw BranchCut("square-root argument on the branch cut");
  }
  const cplx s = std::sqrt(arg);
  const ContinuumSums c = continuum_integrals(z, tol_ / kContinuumWeight);
  const cplx rc = -kContinuumWeight * c.i1;
  const cplx drc = kContinuumWeight * c.i2;
  const cplx q = (z - kPoleHigh) * (z - kPoleLow);
  const cplx dq = 2.0 * z - (kPoleHigh + kPoleLow);
  const cplx smooth = alpha_ + beta_ * s - rc;
  const cplx dsmooth = beta_ / (2.0 * s) - drc;
  EvansSample e;
  // q * R_d = K (74 z + 57.5): the poles cancel exactly.
  e.g = q * smooth - kBoundWeight * (74.0 * z + 57.5);
  e.dg = dq * smooth + q * dsmooth - 74.0 * kBoundWeight;
  e.phi = (q == 0.0) ? cplx(std::numeric_limits<double>::infinity(), 0.0) : e.g / q;
  return e;
}

}  // namespace detail

cplx r_discrete(cplx z) {
  if (z == cplx(kPoleHigh, 0.0)) throw PoleAtInput(kPoleHigh, "R has a pole at 5/4");
  if (z == cplx(kPoleLow, 0.0)) throw PoleAtInput(kPoleLow, "R has a pole at -3/4");
  return detail::kBoundWeight * (75.0 / (z - kPoleHigh) - 1.0 / (z - kPoleLow));
}

ContinuumValue r_continuous(cplx z, double tol) {
  if (!(tol > 0.0)) throw InvalidParameter("quadrature tolerance must be positive");
  const detail::ContinuumSums c = detail::continuum_integrals(z, tol / detail::kContinuumWeight);
  return {-detail::kContinuumWeight * c.i1, detail::kContinuumWeight * c.error};
}

RValue r_total(cplx z, double tol) {
  RValue r;
  r.r_d = r_discrete(z);
  const ContinuumValue c = r_continuous(z, tol);
  r.r_c = c.value;
  r.total = r.r_d + r.r_c;
  r.quad_error = c.error;
  return r;
}

cplx r_total_derivative(cplx z, double tol) {
  if (z == cplx(kPoleHigh, 0.0)) throw PoleAtInput(kPoleHigh, "R has a pole at 5/4");
  if (z == cplx(kPoleLow, 0.0)) throw PoleAtInput(kPoleLow, "R has a pole at -3/4");
  const detail::ContinuumSums c = detail::continuum_integrals(z, tol / detail::kContinuumWeight);
  const cplx a = z - kPoleHigh;
  const cplx b = z - kPoleLow;
  return detail::kBoundWeight * (-75.0 / (a * a) + 1.0 / (b * b)) +
         detail::kContinuumWeight * c.i2;
}

cplx lhs(cplx z, const ReducedCoefficients& coeffs, double control_slope) {
  const cplx arg = 1.0 + z + control_slope;
  if (arg.imag() == 0.0 && arg.real() < 0.0) {
    throw BranchCut("1 + z + l'(0) lies on the negative real axis");
  }
  return coeffs.alpha + coeffs.beta * std::sqrt(arg);
}

EssentialEdges essential_edges(double control_slope) {
  if (!(control_slope < 1.0)) {
    throw UnstableEssential(
        "essential spectrum is unstable: the control slope l'(0) must satisfy l'(0) < 1");
  }
  return {-1.0 + std::max(control_slope, 0.0), -1.0 + std::max(0.0, -control_slope)};
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Stable:
      return "Stable";
    case Verdict::NeutrallyStable:
      return "NeutrallyStable";
    case Verdict::Unstable:
      return "Unstable";
  }
  return "Unstable";
}

Verdict verdict_from_string(const std::string& s) {
  if (s == "Stable") return Verdict::Stable;
  if (s == "NeutrallyStable") return Verdict::NeutrallyStable;
  if (s == "Unstable") return Verdict::Unstable;
  throw InvalidParameter("unknown verdict: " + s);
}

namespace {

constexpr double kNeutralBand = 1e-9;

Verdict translation_verdict(double control_slope) {
  if (control_slope > kNeutralBand) return Verdict::Unstable;
  if (control_slope >= -kNeutralBand) return Verdict::NeutrallyStable;
  return Verdict::Stable;
}

Verdict combine(Verdict translation, double max_other_real) {
  if (max_other_real >= 0.0) return Verdict::Unstable;
  return translation;
}

void sort_eigenvalues(std::vector<cplx>& v) {
  std::sort(v.begin(), v.end(), [](cplx a, cplx b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() < b.imag();
  });
}

}  // namespace

SpectrumReport assemble_spectrum(const ModelParams& params) {
  params.validate();
  const double slope = params.control_slope;
  const EssentialEdges edges = essential_edges(slope);
  SpectrumReport rep;
  rep.translation_eigenvalue = cplx(slope, 0.0);
  rep.essential_edge = edges.edge_lambda;
  rep.essential_edge_hat = edges.edge_lambda_hat;

  std::vector<cplx> others;
  if (params.f_der == 0.0) {
    // No cancellation between fast zeros and slow poles: the bound states
    // survive. The slow equation degenerates to sqrt(1 + lambda) = u* T_o'/T_o.
    others.emplace_back(kPoleHigh + slope, 0.0);
    others.emplace_back(kPoleLow + slope, 0.0);
    const double root = params.u_star * params.to_log_der;
    if (root > 0.0) {
      const double lambda = root * root - 1.0;
      if (lambda > edges.edge_lambda) others.emplace_back(lambda, 0.0);
    }
  } else {
    const ReducedCoefficients coeffs = reduced_coefficients(params);
    rep.search_window = default_search_window(coeffs, slope);
    const std::vector<cplx> roots =
        find_complex_roots(coeffs, slope, rep.search_window, &rep.diagnostics);
    for (cplx z : roots) others.push_back(z + slope);
  }

  double max_other = -std::numeric_limits<double>::infinity();
  for (cplx l : others) max_other = std::max(max_other, l.real());
  rep.verdict = combine(translation_verdict(slope), max_other);
  rep.max_real_part = std::max(max_other, slope);

  rep.eigenvalues = others;
  rep.eigenvalues.push_back(rep.translation_eigenvalue);
  sort_eigenvalues(rep.eigenvalues);
  return rep;
}

Verdict stability_verdict(const ModelParams& params, RootDiagnostics* diagnostics) {
  params.validate();
  const double slope = params.control_slope;
  essential_edges(slope);
  if (params.f_der == 0.0) return assemble_spectrum(params).verdict;
  const Verdict translation = translation_verdict(slope);
  if (translation == Verdict::Unstable) return translation;
  const ReducedCoefficients coeffs = reduced_coefficients(params);
  Rect right = default_search_window(coeffs, slope);
  // Re lambda >= 0 in the shifted variable.
  right.re_min = -slope;
  if (right.re_min >= right.re_max) return translation;
  const int n = count_roots(coeffs, slope, right, diagnostics);
  return n > 0 ? Verdict::Unstable : translation;
}

}  // namespace pulsectl
