// SPDX-License-Identifier: Apache-2.0
//
// Acceptance gate: one PASS/FAIL line per criterion.
//   pulsectl_acceptance --criterion N   (N = 1..9)
//   pulsectl_acceptance                 (all)

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pulsectl/error.hpp"
#include "pulsectl/model.hpp"
#include "pulsectl/oracle.hpp"
#include "pulsectl/pde_sim.hpp"
#include "pulsectl/regions.hpp"
#include "pulsectl/spectral.hpp"

using namespace pulsectl;

namespace {

struct Outcome {
  bool pass = true;
  std::string summary;
  std::string payload;  // every number that determinism compares
};

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string g3(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

void record(Outcome& o, double x) {
  o.payload += g17(x);
  o.payload += '\n';
}

void record(Outcome& o, cplx z) {
  o.payload += g17(z.real()) + " " + g17(z.imag()) + '\n';
}

// Uniform on [0, 1) from the top 53 bits; portable across standard libraries.
class Uniform {
public:
  explicit Uniform(std::uint64_t seed) : rng_(seed) {}
  double operator()() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  double in(double lo, double hi) { return lo + (hi - lo) * (*this)(); }

private:
  std::mt19937_64 rng_;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ModelParams reference_example(double gain) {
  ModelParams p;
  p.u_star = 1.0;
  p.f_val = 1.0;
  p.f_der = -3.0;
  p.to_log_der = 8.0;
  p.control_slope = gain;
  return p;
}

// ------------------------------------------------------------------ 1
Outcome criterion1() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  Uniform u(1);
  std::vector<cplx> pts;
  for (int i = 0; i < 10; ++i) pts.emplace_back(u.in(1.3, 50.0), 0.0);
  pts.back() = 50.0;
  for (int i = 0; i < 10; ++i) {
    double b = 0.0;
    while (b == 0.0) b = u.in(-10.0, 10.0);
    pts.emplace_back(u.in(-0.5, 10.0), b);
  }
  double worst = 0.0;
  for (cplx z : pts) {
    const cplx closed = r_total(z).total;
    const cplx brute = r_oracle(z);
    worst = std::max(worst, std::abs(closed - brute));
    record(o, closed);
    record(o, brute);
  }
  const double t = seconds_since(t0);
  o.pass = worst <= 1e-4 && t < 30.0;
  o.summary = "max |r_total - r_oracle| = " + g3(worst) + " over 20 points (<= 1e-4), " + g3(t) + " s (< 30)";
  return o;
}

// ------------------------------------------------------------------ 2
Outcome criterion2() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto top = top_eigenvalues(FastOperator::build(FastGrid{}), 3);
  const double expected[] = {1.25, 0.0, -0.75};
  double worst = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    worst = std::max(worst, std::abs(top[i] - expected[i]));
    record(o, top[i]);
  }
  const double t = seconds_since(t0);
  o.pass = worst <= 1e-3 && t < 60.0;
  o.summary = "top eigenvalues " + g17(top[0]) + ", " + g3(top[1]) + ", " + g17(top[2]) +
              "; max error " + g3(worst) + " (<= 1e-3), " + g3(t) + " s";
  return o;
}

// ------------------------------------------------------------------ 3
Outcome criterion3() {
  Outcome o;
  int failed = 0;
  double worst_ip = 0.0, worst_norm = 0.0, worst_theta = 0.0;
  for (const IdentityCheck& c : eigenfunction_identities()) {
    record(o, c.computed);
    double& worst = c.tolerance > 1e-9 ? worst_ip : worst_norm;
    worst = std::max(worst, c.abs_error);
    failed += c.pass ? 0 : 1;
  }
  for (double mu : {-1.5, -2.0, -5.0}) {
    const double v = theta_inner_product(mu).real();
    record(o, v);
    const double e = std::abs(v - theta_inner_product_exact(mu));
    worst_theta = std::max(worst_theta, e);
    failed += e <= 1e-6 ? 0 : 1;
  }
  o.pass = failed == 0;
  o.summary = "inner products " + g3(worst_ip) + " (<= 1e-8), norms " + g3(worst_norm) +
              " (<= 1e-10), theta " + g3(worst_theta) + " (<= 1e-6)";
  return o;
}

// ------------------------------------------------------------------ 4
bool near_pole(cplx z) {
  return std::abs(z - kPoleHigh) < 1e-3 || std::abs(z - kPoleLow) < 1e-3;
}

Outcome criterion4() {
  Outcome o;
  Uniform u(4);

  // (I) log-uniform |Im z| so the neighbourhood of the real axis is probed.
  int viol1 = 0, viol1_lower_pole = 0, viol1_ray = 0, viol1_other = 0;
  for (int n = 0; n < 500;) {
    const double b = std::pow(10.0, u.in(-4.0, 1.3)) * (u() < 0.5 ? -1.0 : 1.0);
    const cplx z(u.in(-5.0, 20.0), b);
    if (near_pole(z)) continue;
    ++n;
    const cplx r = r_total(z).total;
    record(o, r);
    if ((r.imag() > 0) - (r.imag() < 0) != -((z.imag() > 0) - (z.imag() < 0))) {
      ++viol1;
      if (z.real() <= -1.0) {
        ++viol1_ray;
      } else if (std::abs(z - kPoleLow) < 0.5) {
        ++viol1_lower_pole;
      } else {
        ++viol1_other;
      }
    }
  }

  // (II) samples concentrated near the line Re z = 1.28.
  int viol2 = 0;
  double worst2 = std::numeric_limits<double>::infinity();
  cplx worst2_at;
  for (int n = 0; n < 500;) {
    const double s = u();
    const cplx z(1.28 + 20.0 * s * s * s, u.in(-50.0, 50.0));
    if (near_pole(z)) continue;
    ++n;
    const double re = r_total(z).total.real();
    record(o, re);
    if (!(re > 0.0)) ++viol2;
    if (re < worst2) {
      worst2 = re;
      worst2_at = z;
    }
  }

  // (III) positive and strictly decreasing on (5/4 + 1e-3, 100].
  int viol3 = 0;
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 1000; ++k) {
    const double x = 1.251 + (100.0 - 1.251) * (k + 1) / 1000.0;
    const double r = r_total(cplx(x, 0.0)).total.real();
    if (k % 50 == 0) record(o, r);
    if (!(r > 0.0) || !(r < prev)) ++viol3;
    prev = r;
  }

  // (IV) strip 0 <= Re z <= 1, |Im z| <= 10.
  int viol4 = 0;
  for (int n = 0; n < 500; ++n) {
    const cplx z(u.in(0.0, 1.0), u.in(-10.0, 10.0));
    const double re = r_total(z).total.real();
    record(o, re);
    if (!(re < 0.0)) ++viol4;
  }

  // Continuum bound for Re z >= 0.
  double max_rc = -std::numeric_limits<double>::infinity();
  for (int n = 0; n < 500; ++n) {
    const cplx z(n < 100 ? 0.5 * n : u.in(0.0, 50.0), n < 100 ? 0.0 : u.in(-50.0, 50.0));
    max_rc = std::max(max_rc, r_continuous(z).value.real());
  }
  record(o, max_rc);
  const bool bound_ok = max_rc <= 9.06e-3;

  auto tag = [](bool ok) { return ok ? std::string("pass") : std::string("FAIL"); };
  o.pass = viol1 == 0 && viol2 == 0 && viol3 == 0 && viol4 == 0 && bound_ok;
  o.summary = "(I " + tag(viol1 == 0) + ", II " + tag(viol2 == 0) + ", III " + tag(viol3 == 0) +
              ", IV " + tag(viol4 == 0) + ", bound " + tag(bound_ok) + ") I: " +
              std::to_string(viol1) + "/500 sign violations (" + std::to_string(viol1_ray) +
              " along the cut Re <= -1, " + std::to_string(viol1_lower_pole) + " within 0.5 of z = -3/4, " +
              std::to_string(viol1_other) + " elsewhere); II: " + std::to_string(viol2) +
              "/500 with Re r_total <= 0, worst " + g3(worst2) + " at " + g17(worst2_at.real()) +
              (worst2_at.imag() < 0 ? "" : "+") + g3(worst2_at.imag()) + "i; III: " +
              std::to_string(viol3) + "/1000; IV: " + std::to_string(viol4) +
              "/500; max Re r_continuous = " + g3(max_rc);
  return o;
}

// ------------------------------------------------------------------ 5
Outcome criterion5() {
  Outcome o;
  Uniform u(5);
  auto coeffs = [](double a, double b) {
    ReducedCoefficients c;
    c.alpha = a;
    c.beta = b;
    c.nu = -a / b;
    return c;
  };
  int bad1 = 0, bad2 = 0, bad3 = 0, bad5 = 0, draws1 = 0;
  for (int n = 0; n < 50; ++n) {
    const ReducedCoefficients c = coeffs(u.in(-10.0, 10.0), u.in(0.05, 10.0));
    bool hit = false;
    for (cplx z : find_complex_roots(c, 0.0, default_search_window(c, 0.0))) {
      record(o, z);
      if (std::abs(z.imag()) > 1e-8) {
        ++bad1;
        hit = true;
      }
    }
    draws1 += hit ? 1 : 0;
  }
  for (int n = 0; n < 50; ++n) {
    const ReducedCoefficients c = coeffs(u.in(-10.0, 0.0), u.in(0.05, 10.0));
    const Rect w = default_search_window(c, 0.0);
    const auto roots = find_real_roots(c, 0.0, {kPoleHigh, w.re_max});
    if (roots.empty()) {
      ++bad2;
    } else {
      record(o, roots.back());
    }
  }
  for (int n = 0; n < 50; ++n) {
    const double b = u.in(0.05, 10.0);
    const ReducedCoefficients c = coeffs(-b * u.in(1.0, 5.0), b);
    for (double gain : {0.0, -10.0}) {
      const auto roots = find_complex_roots(c, gain, default_search_window(c, gain));
      double top = -std::numeric_limits<double>::infinity();
      for (cplx z : roots) top = std::max(top, z.real());
      record(o, top);
      if (!(top > -gain)) ++bad3;
    }
  }
  for (int n = 0; n < 50; ++n) {
    const ReducedCoefficients c = coeffs(u.in(0.05, 10.0), u.in(0.05, 10.0));
    bool emptied = false;
    for (double gain = -1.0; gain >= -4096.0 && !emptied; gain *= 2.0) {
      if (count_roots(c, gain, default_search_window(c, gain)) == 0) {
        emptied = true;
        record(o, gain);
      }
    }
    if (!emptied) ++bad5;
  }
  auto tag = [](int bad) { return bad == 0 ? std::string("pass") : std::string("FAIL"); };
  o.pass = bad1 + bad2 + bad3 + bad5 == 0;
  o.summary = "(1 " + tag(bad1) + ", 2 " + tag(bad2) + ", 3 " + tag(bad3) + ", 5 " + tag(bad5) +
              ") (1) complex roots for beta > 0: " + std::to_string(bad1) + " in " + std::to_string(draws1) + " draws" +
              "; (2) draws without a real root > 5/4: " + std::to_string(bad2) +
              "; (3) draws with largest root <= -gain: " + std::to_string(bad3) + "/100" +
              "; (5) draws never emptied down to -4096: " + std::to_string(bad5) + " (50 draws each)";
  return o;
}

// ------------------------------------------------------------------ 6
Outcome criterion6() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const SpectrumReport free = assemble_spectrum(reference_example(0.0));
  const SpectrumReport ctrl = assemble_spectrum(reference_example(-3.0));
  bool all_left = true;
  for (cplx l : ctrl.eigenvalues) {
    record(o, l);
    all_left = all_left && l.real() < 0.0;
  }
  for (cplx l : free.eigenvalues) record(o, l);
  const ReducedCoefficients c = reduced_coefficients(reference_example(0.0));
  const double t = seconds_since(t0);
  const bool coeff_ok = std::abs(c.alpha - 2.0) < 1e-12 && std::abs(c.beta + 1.0) < 1e-12;
  o.pass = coeff_ok && free.verdict == Verdict::Unstable && ctrl.verdict == Verdict::Stable && all_left &&
           ctrl.essential_edge == -1.0 && t < 10.0;
  o.summary = "alpha = " + g3(c.alpha) + ", beta = " + g3(c.beta) + "; gain 0: " + to_string(free.verdict) +
              " (max Re " + g17(free.max_real_part) + "); gain -3: " + to_string(ctrl.verdict) +
              " (max Re " + g17(ctrl.max_real_part) + "), essential edge " + g3(ctrl.essential_edge) +
              ", " + g3(t) + " s";
  return o;
}

// ------------------------------------------------------------------ 7
double segment_distance(double px, double py, double ax, double ay, double bx, double by) {
  const double dx = bx - ax, dy = by - ay;
  const double t = std::clamp(((px - ax) * dx + (py - ay) * dy) / (dx * dx + dy * dy), 0.0, 1.0);
  return std::hypot(px - ax - t * dx, py - ay - t * dy);
}

Outcome criterion7(unsigned threads) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  SweepSpec spec;
  spec.threads = threads;
  const SweepResult res = sweep_plane(spec);
  const double t = seconds_since(t0);

  int class_bad = 0, stable_forbidden = 0, stable = 0, errors = 0;
  for (const RegionCell& c : res.cells) {
    TheoremClass expect = TheoremClass::Controllable_NuSmall;
    if (c.f_der == 0.0) {
      expect = TheoremClass::UnstableUncontrollable_fPrimeZero;
    } else if (c.f_der < 0.0) {
      expect = TheoremClass::Controllable_fPrimeNegative;
    } else if (c.nu * spec.u_star >= 1.0) {
      expect = TheoremClass::UnstableUncontrollable_NuLarge;
    }
    if (c.theorem_class != expect) ++class_bad;
    const bool st = uncontrolled_stable(c);
    stable += st ? 1 : 0;
    errors += c.error.empty() ? 0 : 1;
    if (st && (c.f_der == 0.0 || (c.f_der > 0.0 && c.nu * spec.u_star >= 1.0))) ++stable_forbidden;
    o.payload += to_string(c.theorem_class) + " " + to_string(c.uncontrolled_verdict) + " " +
                 g17(c.max_real_part) + " " + (c.min_gain ? g17(*c.min_gain) : "-") + "\n";
  }

  // Every grid edge joining a stable and an unstable valid cell must carry a
  // traced boundary point that lies on a polyline.
  std::vector<std::pair<double, double>> on_lines;
  int hopf_lines = 0, fold_lines = 0;
  for (const Polyline& p : res.polylines) {
    if (p.points.size() < 2) continue;
    (p.tag == BoundaryTag::Hopf ? hopf_lines : fold_lines) += 1;
    for (const auto& q : p.points) {
      on_lines.push_back(q);
      o.payload += to_string(p.tag) + " " + g17(q.first) + " " + g17(q.second) + "\n";
    }
  }
  const std::size_t nf = spec.n_f_der, nn = spec.n_nu;
  int sign_edges = 0, uncovered = 0;
  auto valid = [&](const RegionCell& c) { return c.error.empty() && c.f_der != 0.0; };
  auto check_edge = [&](const RegionCell& a, const RegionCell& b) {
    if (!valid(a) || !valid(b) || uncontrolled_stable(a) == uncontrolled_stable(b)) return;
    ++sign_edges;
    const bool covered = std::any_of(on_lines.begin(), on_lines.end(), [&](const auto& q) {
      return segment_distance(q.first, q.second, a.f_der, a.nu, b.f_der, b.nu) <= 1e-9;
    });
    uncovered += covered ? 0 : 1;
  };
  for (std::size_t i = 0; i < nf; ++i) {
    for (std::size_t j = 0; j < nn; ++j) {
      if (i + 1 < nf) check_edge(res.at(i, j), res.at(i + 1, j));
      if (j + 1 < nn) check_edge(res.at(i, j), res.at(i, j + 1));
    }
  }

  o.pass = class_bad == 0 && stable_forbidden == 0 && hopf_lines > 0 && fold_lines > 0 && uncovered == 0 &&
           stable > 0 && t < 600.0;
  o.summary = std::to_string(nf) + "x" + std::to_string(nn) + " cells in " + g3(t) + " s on " +
              std::to_string(threads) + " threads; class mismatches " + std::to_string(class_bad) +
              "; stable cells in uncontrollable regions " + std::to_string(stable_forbidden) + "; stable " +
              std::to_string(stable) + ", degenerate " + std::to_string(errors) + "; polylines Hopf " +
              std::to_string(hopf_lines) + ", Fold " + std::to_string(fold_lines) + "; sign-change edges " +
              std::to_string(sign_edges) + ", uncovered " + std::to_string(uncovered);
  return o;
}

// ------------------------------------------------------------------ 8
Outcome criterion8() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const double predicted = assemble_spectrum(reference_example(0.0)).max_real_part;
  const SimTrace free = run(SimConfig::from_params(reference_example(0.0)));
  const SimTrace ctrl = run(SimConfig::from_params(reference_example(-3.0)));
  const double t = seconds_since(t0);
  for (const SimTrace* tr : {&free, &ctrl}) {
    record(o, tr->fitted_rate);
    record(o, tr->fit_r2);
    for (double d : tr->deviation_norms) record(o, d);
  }
  const double rel = std::abs(free.fitted_rate - predicted) / std::abs(predicted);
  o.pass = free.fit_r2 > 0.99 && rel <= 0.15 && ctrl.fitted_rate < 0.0 && ctrl.fit_r2 > 0.99 && t < 900.0;
  o.summary = "uncontrolled rate " + g17(free.fitted_rate) + " vs max Re lambda " + g17(predicted) + " (" +
              g3(100.0 * rel) + "% <= 15%, r2 " + g3(free.fit_r2) + "); gain -3 rate " + g17(ctrl.fitted_rate) +
              " (r2 " + g3(ctrl.fit_r2) + "); " + g3(t) + " s";
  return o;
}

// ------------------------------------------------------------------ 9
Outcome run_criterion(int n, unsigned threads);

Outcome criterion9() {
  Outcome o;
  int mismatched = 0;
  std::string which;
  for (int n = 1; n <= 8; ++n) {
    // The sweep is repeated with a different worker count.
    const std::string a = run_criterion(n, 1).payload;
    const std::string b = run_criterion(n, 4).payload;
    if (a != b || a.empty()) {
      ++mismatched;
      which += " " + std::to_string(n);
    }
  }
  o.pass = mismatched == 0;
  o.summary = mismatched == 0 ? "criteria 1-8 reproduced byte for byte (sweep on 1 and 4 threads)"
                              : "outputs differ for criteria" + which;
  return o;
}

Outcome run_criterion(int n, unsigned threads) {
  try {
    switch (n) {
      case 1:
        return criterion1();
      case 2:
        return criterion2();
      case 3:
        return criterion3();
      case 4:
        return criterion4();
      case 5:
        return criterion5();
      case 6:
        return criterion6();
      case 7:
        return criterion7(threads);
      case 8:
        return criterion8();
      default:
        return criterion9();
    }
  } catch (const std::exception& e) {
    Outcome o;
    o.pass = false;
    o.summary = std::string("exception: ") + e.what();
    return o;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  int only = 0;
  app.add_option("--criterion", only, "run a single criterion (1-9); default all")->check(CLI::Range(1, 9));
  CLI11_PARSE(app, argc, argv);

  bool all_pass = true;
  for (int n = 1; n <= 9; ++n) {
    if (only != 0 && n != only) continue;
    const Outcome o = run_criterion(n, 4);
    all_pass = all_pass && o.pass;
    std::cout << "criterion " << n << ": " << (o.pass ? "PASS" : "FAIL") << " " << o.summary << std::endl;
  }
  return all_pass ? 0 : 1;
}
