// SPDX-License-Identifier: Apache-2.0
//
// Zero location for the reduced Evans function. All searches work on the
// pole-free g(z) = (z - 5/4)(z + 3/4) Phi(z), which has exactly the zeros of
// Phi because R has nonzero residues at both poles.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <numbers>
#include <unordered_map>
#include <utility>
#include <vector>

#include <boost/math/tools/toms748_solve.hpp>

#include "evans.hpp"
#include "pulsectl/error.hpp"
#include "pulsectl/spectral.hpp"

namespace pulsectl {

namespace {

using detail::EvansFunction;
using detail::EvansSample;

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kMinCell = 1e-6;
constexpr double kEdgeOffset = 1e-6;
constexpr double kNewtonTol = 1e-10;
constexpr double kRealSnap = 1e-8;
constexpr double kDedupe = 1e-8;

// A contour sample fell (numerically) on a zero of g.
struct BoundaryHit {};

struct PointKey {
  std::uint64_t re, im;
  bool operator==(const PointKey&) const = default;
};

struct PointHash {
  std::size_t operator()(const PointKey& k) const noexcept {
    return static_cast<std::size_t>(k.re * 0x9E3779B97F4A7C15ULL ^ (k.im + 0x632BE59BD9B4E019ULL));
  }
};

class ContourEngine {
public:
  explicit ContourEngine(const EvansFunction& f) : f_(f) {}

  const EvansSample& at(cplx z) {
    const PointKey key{std::bit_cast<std::uint64_t>(z.real()),
                       std::bit_cast<std::uint64_t>(z.imag())};
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    return cache_.emplace(key, f_(z)).first->second;
  }

  /// Winding number of g around the rectangle (counter-clockwise).
  int winding(const Rect& r) {
    const std::array<cplx, 4> corners = {cplx(r.re_min, r.im_min), cplx(r.re_max, r.im_min),
                                         cplx(r.re_max, r.im_max), cplx(r.re_min, r.im_max)};
    double total = 0.0;
    for (int i = 0; i < 4; ++i) total += edge_arg(corners[i], corners[(i + 1) % 4]);
    const double turns = total / kTwoPi;
    const double k = std::round(turns);
    if (std::abs(turns - k) > 0.05) throw BoundaryHit{};
    return static_cast<int>(k);
  }

  std::int64_t evaluations() const { return f_.evaluations(); }

private:
  static bool resolved(const EvansSample& a, const EvansSample& b, double h) {
    const double ma = std::abs(a.g);
    const double mb = std::abs(b.g);
    const double m = std::min(ma, mb);
    if (!(m > 0.0)) return false;
    if (std::abs(b.g - a.g) > 0.5 * m) return false;
    return h * std::max(std::abs(a.dg), std::abs(b.dg)) <= m;
  }

  double edge_arg(cplx a, cplx b) {
    constexpr int kInitial = 8;
    double sum = 0.0;
    std::vector<std::pair<cplx, cplx>> stack;
    for (int i = kInitial; i-- > 0;) {
      const cplx s = a + (b - a) * (static_cast<double>(i) / kInitial);
      const cplx e = (i + 1 == kInitial) ? b : a + (b - a) * (static_cast<double>(i + 1) / kInitial);
      stack.emplace_back(s, e);
    }
    while (!stack.empty()) {
      const auto [s, e] = stack.back();
      stack.pop_back();
      const EvansSample& gs = at(s);
      const EvansSample& ge = at(e);
      const double h = std::abs(e - s);
      if (resolved(gs, ge, h)) {
        sum += std::arg(ge.g / gs.g);
        continue;
      }
      if (h < 1e-11 * (1.0 + std::abs(s))) throw BoundaryHit{};
      const cplx m = 0.5 * (s + e);
      stack.emplace_back(m, e);
      stack.emplace_back(s, m);
    }
    return sum;
  }

  const EvansFunction& f_;
  std::unordered_map<PointKey, EvansSample, PointHash> cache_;
};

struct Found {
  cplx z;
  int multiplicity = 1;
};

cplx centre(const Rect& r) {
  return {0.5 * (r.re_min + r.re_max), 0.5 * (r.im_min + r.im_max)};
}

double diameter(const Rect& r) { return std::hypot(r.re_max - r.re_min, r.im_max - r.im_min); }

double phi_scale(const ReducedCoefficients& c, double slope, cplx z) {
  return std::max(1.0, std::abs(c.alpha) + std::abs(c.beta) * std::sqrt(std::abs(1.0 + z + slope)));
}

// Newton on g from z0; returns true when |Phi| meets the tolerance.
bool newton(const EvansFunction& f, const ReducedCoefficients& c, double slope, cplx z0,
            const Rect& box, cplx& out) try {
  cplx z = z0;
  const double span = diameter(box);
  const Rect guard{box.re_min - span, box.re_max + span, box.im_min - span, box.im_max + span};
  for (int it = 0; it < 60; ++it) {
    EvansSample e = f(z);
    if (!(std::abs(e.dg) > 0.0)) return false;
    const cplx step = e.g / e.dg;
    z -= step;
    if (!guard.contains(z)) return false;
    if (std::abs(step) <= 4e-16 * (1.0 + std::abs(z))) break;
  }
  const EvansSample e = f(z);
  if (!(std::abs(e.phi) <= kNewtonTol * phi_scale(c, slope, z))) return false;
  out = z;
  return true;
} catch (const DomainError&) {
  // Iterate left the analytic domain (cut or ray); treat as non-convergence.
  return false;
}

void check_rect(const Rect& r, double slope) {
  if (!(r.re_min < r.re_max) || !(r.im_min < r.im_max)) {
    throw InvalidParameter("search rectangle must have positive width and height");
  }
  const double cut = std::max(-1.0, -1.0 - slope);
  if (r.im_min <= 0.0 && r.im_max >= 0.0 && !(r.re_min > cut)) {
    throw InvalidParameter(
        "search rectangle meets the essential ray or the square-root branch cut");
  }
}

// Winding of the top-level rectangle, nudging the contour off zeros of g.
int robust_winding(ContourEngine& eng, Rect& r, double slope) {
  const double cut = std::max(-1.0, -1.0 - slope);
  for (int attempt = 0; attempt < 5; ++attempt) {
    try {
      return eng.winding(r);
    } catch (const BoundaryHit&) {
      const double d = kEdgeOffset * (attempt + 1);
      const double left = r.re_min - d;
      const bool crosses_axis = r.im_min <= 0.0 && r.im_max >= 0.0;
      r.re_min = (crosses_axis && !(left > cut)) ? r.re_min + d : left;
      r.re_max += d;
      r.im_min -= d;
      r.im_max += d;
    }
  }
  throw RootIsolationFailure("zero of the Evans function on the search contour");
}

class Isolator {
public:
  Isolator(const EvansFunction& f, ContourEngine& eng, const ReducedCoefficients& c, double slope)
      : f_(f), eng_(eng), c_(c), slope_(slope) {}

  void run(const Rect& cell, int w, int depth) {
    ++cells_;
    if (w == 0) return;
    if (w < 0) throw RootIsolationFailure("negative winding number in a cell");
    if (w == 1) {
      cplx z;
      if (newton(f_, c_, slope_, centre(cell), cell, z) && inside(cell, z)) {
        found_.push_back({z, 1});
        return;
      }
    }
    if (diameter(cell) < kMinCell || depth > 80) {
      cplx z = centre(cell);
      cplx refined;
      if (newton(f_, c_, slope_, z, cell, refined)) z = refined;
      found_.push_back({z, w});
      return;
    }
    static constexpr std::array<std::pair<double, double>, 4> kSplits = {
        {{0.5123, 0.4871}, {0.4871, 0.5123}, {0.5347, 0.4659}, {0.4659, 0.5347}}};
    for (const auto& [fr, fi] : kSplits) {
      const double xm = cell.re_min + fr * (cell.re_max - cell.re_min);
      const double ym = cell.im_min + fi * (cell.im_max - cell.im_min);
      const std::array<Rect, 4> kids = {Rect{cell.re_min, xm, cell.im_min, ym},
                                        Rect{xm, cell.re_max, cell.im_min, ym},
                                        Rect{xm, cell.re_max, ym, cell.im_max},
                                        Rect{cell.re_min, xm, ym, cell.im_max}};
      std::array<int, 4> wk{};
      try {
        for (int i = 0; i < 4; ++i) wk[static_cast<std::size_t>(i)] = eng_.winding(kids[static_cast<std::size_t>(i)]);
      } catch (const BoundaryHit&) {
        continue;
      }
      if (wk[0] + wk[1] + wk[2] + wk[3] != w) continue;
      for (int i = 0; i < 4; ++i) run(kids[static_cast<std::size_t>(i)], wk[static_cast<std::size_t>(i)], depth + 1);
      return;
    }
    throw RootIsolationFailure("inconsistent winding numbers after repeated subdivision");
  }

  std::vector<Found>& found() { return found_; }
  int cells() const { return cells_; }

private:
  static bool inside(const Rect& r, cplx z) {
    const double pad = 1e-9 * (1.0 + diameter(r));
    return z.real() >= r.re_min - pad && z.real() <= r.re_max + pad &&
           z.imag() >= r.im_min - pad && z.imag() <= r.im_max + pad;
  }

  const EvansFunction& f_;
  ContourEngine& eng_;
  const ReducedCoefficients& c_;
  double slope_;
  std::vector<Found> found_;
  int cells_ = 0;
};

// Real Newton along the axis; the Evans function is real there.
bool snap_to_axis(const EvansFunction& f, const ReducedCoefficients& c, double slope, double x0,
                  double& out) try {
  double x = x0;
  for (int it = 0; it < 40; ++it) {
    const EvansSample e = f(cplx(x, 0.0));
    const double d = e.dg.real();
    if (!(std::abs(d) > 0.0)) return false;
    const double step = e.g.real() / d;
    x -= step;
    if (!std::isfinite(x)) return false;
    if (std::abs(step) <= 4e-16 * (1.0 + std::abs(x))) break;
  }
  const EvansSample e = f(cplx(x, 0.0));
  if (!(std::abs(e.phi) <= kNewtonTol * phi_scale(c, slope, cplx(x, 0.0)))) return false;
  if (std::abs(x - x0) > 1e-6) return false;
  out = x;
  return true;
} catch (const DomainError&) {
  return false;
}

void sort_canonical(std::vector<cplx>& v) {
  std::sort(v.begin(), v.end(), [](cplx a, cplx b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() < b.imag();
  });
}

void verify_resolvent_bound() {
  static std::once_flag once;
  std::call_once(once, [] {
    // Zeros beyond the default window are excluded by |R| <= 12 away from unit
    // disks around both poles; confirm the bound on a grid once per process.
    double worst = 0.0;
    for (int i = 0; i <= 80; ++i) {
      const double re = -0.999 + 120.0 * (static_cast<double>(i) / 80.0) *
                                     (static_cast<double>(i) / 80.0);
      for (int j = -40; j <= 40; ++j) {
        const double im = 120.0 * (static_cast<double>(j) / 40.0) *
                          std::abs(static_cast<double>(j) / 40.0);
        const cplx z(re, im);
        if (std::abs(z - kPoleHigh) < 1.0 || std::abs(z - kPoleLow) < 1.0) continue;
        worst = std::max(worst, std::abs(r_total(z, 1e-8).total));
      }
    }
    if (worst > 12.0) {
      throw NumericalError("resolvent bound |R| <= 12 violated on the verification grid");
    }
  });
}

}  // namespace

Rect default_search_window(const ReducedCoefficients& coeffs, double control_slope) {
  if (coeffs.beta == 0.0) throw DegenerateControl("beta = 0 has no square-root term");
  verify_resolvent_bound();
  const EssentialEdges edges = essential_edges(control_slope);
  const double big = (std::abs(coeffs.alpha) + 12.0) / std::abs(coeffs.beta);
  const double big2 = big * big;
  Rect r;
  r.re_min = edges.edge_lambda_hat + kEdgeOffset;
  r.re_max = std::max(10.0, big2 - 1.0 - control_slope);
  r.im_max = std::max(1.5, big2);
  r.im_min = -r.im_max;
  return r;
}

std::vector<double> find_real_roots(const ReducedCoefficients& coeffs, double control_slope,
                                    RealInterval window) {
  essential_edges(control_slope);
  const double cut = std::max(-1.0, -1.0 - control_slope);
  if (!(window.lo > cut) || !(window.hi > window.lo)) {
    throw InvalidParameter("real search window must lie right of the essential edge");
  }
  const EvansFunction f(coeffs, control_slope);
  auto g = [&](double x) { return f(cplx(x, 0.0)).g.real(); };

  constexpr int kGrid = 2000;
  std::vector<double> roots;
  double x_prev = window.lo;
  double g_prev = g(x_prev);
  for (int k = 1; k <= kGrid; ++k) {
    const double t = static_cast<double>(k) / kGrid;
    const double x = (k == kGrid) ? window.hi : window.lo + (window.hi - window.lo) * t * t;
    const double gx = g(x);
    if (gx == 0.0) {
      roots.push_back(x);
    } else if (g_prev != 0.0 && std::signbit(gx) != std::signbit(g_prev)) {
      std::uintmax_t iters = 200;
      const auto br = boost::math::tools::toms748_solve(
          g, x_prev, x, g_prev, gx, boost::math::tools::eps_tolerance<double>(52), iters);
      const double r = 0.5 * (br.first + br.second);
      roots.push_back(std::abs(g(br.first)) < std::abs(g(r)) ? br.first : r);
    }
    x_prev = x;
    g_prev = gx;
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  return roots;
}

int count_roots(const ReducedCoefficients& coeffs, double control_slope, Rect rect,
                RootDiagnostics* diagnostics) {
  essential_edges(control_slope);
  check_rect(rect, control_slope);
  const EvansFunction f(coeffs, control_slope);
  ContourEngine eng(f);
  const int w = robust_winding(eng, rect, control_slope);
  if (w < 0) throw RootIsolationFailure("negative winding number on the search contour");
  if (diagnostics) {
    diagnostics->function_evaluations += f.evaluations();
    diagnostics->winding_total += w;
    diagnostics->cells_examined += 1;
  }
  return w;
}

std::vector<cplx> find_complex_roots(const ReducedCoefficients& coeffs, double control_slope,
                                     Rect rect, RootDiagnostics* diagnostics) {
  essential_edges(control_slope);
  check_rect(rect, control_slope);
  const EvansFunction f(coeffs, control_slope);
  ContourEngine eng(f);
  const int total = robust_winding(eng, rect, control_slope);
  if (total < 0) throw RootIsolationFailure("negative winding number on the search contour");

  Isolator iso(f, eng, coeffs, control_slope);
  iso.run(rect, total, 0);
  std::vector<Found>& found = iso.found();

  for (Found& r : found) {
    if (r.z.imag() != 0.0 && std::abs(r.z.imag()) < kRealSnap) {
      double x;
      if (snap_to_axis(f, coeffs, control_slope, r.z.real(), x)) r.z = cplx(x, 0.0);
    }
  }

  std::sort(found.begin(), found.end(), [](const Found& a, const Found& b) {
    if (a.z.real() != b.z.real()) return a.z.real() < b.z.real();
    return a.z.imag() < b.z.imag();
  });
  std::vector<Found> merged;
  for (const Found& r : found) {
    auto hit = std::find_if(merged.begin(), merged.end(),
                            [&](const Found& m) { return std::abs(m.z - r.z) <= kDedupe; });
    if (hit != merged.end()) {
      hit->multiplicity += r.multiplicity;
    } else {
      merged.push_back(r);
    }
  }

  // Pair conjugates and make them exact mirror images.
  std::vector<bool> paired(merged.size(), false);
  for (std::size_t i = 0; i < merged.size(); ++i) {
    if (paired[i] || merged[i].z.imag() <= 0.0) continue;
    std::size_t best = merged.size();
    double best_d = 1e-6;
    for (std::size_t j = 0; j < merged.size(); ++j) {
      if (j == i || paired[j] || merged[j].z.imag() >= 0.0) continue;
      const double d = std::abs(merged[j].z - std::conj(merged[i].z));
      if (d <= best_d) {
        best_d = d;
        best = j;
      }
    }
    if (best < merged.size()) {
      const cplx avg = 0.5 * (merged[i].z + std::conj(merged[best].z));
      merged[i].z = avg;
      merged[best].z = std::conj(avg);
      paired[i] = paired[best] = true;
    }
  }

  int count = 0;
  std::vector<cplx> out;
  for (const Found& r : merged) {
    count += r.multiplicity;
    for (int k = 0; k < r.multiplicity; ++k) out.push_back(r.z);
  }
  if (count != total) {
    throw RootIsolationFailure("located zeros do not match the winding number of the contour");
  }
  sort_canonical(out);
  if (diagnostics) {
    diagnostics->function_evaluations += f.evaluations();
    diagnostics->winding_total += total;
    diagnostics->cells_examined += iso.cells();
  }
  return out;
}

}  // namespace pulsectl
