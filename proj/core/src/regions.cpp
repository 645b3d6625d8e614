// SPDX-License-Identifier: Apache-2.0

#include "pulsectl/regions.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <thread>

#include "pulsectl/error.hpp"

namespace pulsectl {

std::string to_string(TheoremClass c) {
  switch (c) {
    case TheoremClass::UnstableUncontrollable_fPrimeZero:
      return "UnstableUncontrollable_fPrimeZero";
    case TheoremClass::Controllable_fPrimeNegative:
      return "Controllable_fPrimeNegative";
    case TheoremClass::UnstableUncontrollable_NuLarge:
      return "UnstableUncontrollable_NuLarge";
    case TheoremClass::Controllable_NuSmall:
      return "Controllable_NuSmall";
  }
  return "UnstableUncontrollable_fPrimeZero";
}

TheoremClass theorem_class_from_string(const std::string& s) {
  for (TheoremClass c :
       {TheoremClass::UnstableUncontrollable_fPrimeZero, TheoremClass::Controllable_fPrimeNegative,
        TheoremClass::UnstableUncontrollable_NuLarge, TheoremClass::Controllable_NuSmall}) {
    if (to_string(c) == s) return c;
  }
  throw InvalidParameter("unknown theorem class: " + s);
}

bool is_controllable(TheoremClass c) {
  return c == TheoremClass::Controllable_fPrimeNegative || c == TheoremClass::Controllable_NuSmall;
}

std::string to_string(BoundaryTag t) { return t == BoundaryTag::Hopf ? "Hopf" : "Fold"; }

TheoremClass classify_point(double f_der, double nu, double u_star) {
  if (f_der == 0.0) return TheoremClass::UnstableUncontrollable_fPrimeZero;
  if (f_der < 0.0) return TheoremClass::Controllable_fPrimeNegative;
  // nu >= 1/u* compared as nu * u* >= 1 to keep the boundary exact.
  if (nu * u_star >= 1.0) return TheoremClass::UnstableUncontrollable_NuLarge;
  return TheoremClass::Controllable_NuSmall;
}

TheoremClass classify_theorem(const ModelParams& params) {
  params.validate();
  return classify_point(params.f_der, params.nu(), params.u_star);
}

Verdict uncontrolled_verdict(const ModelParams& params) {
  return assemble_spectrum(params.with_gain(0.0)).verdict;
}

namespace {

bool stabilised(double gain, Verdict v) {
  return gain == 0.0 ? v != Verdict::Unstable : v == Verdict::Stable;
}

}  // namespace

GainSearchResult min_control_gain(const ModelParams& params, double gain_floor, double tol) {
  if (!is_controllable(classify_theorem(params))) {
    throw NotControllable("no proportional control gain stabilises this pulse");
  }
  if (!(gain_floor < 0.0) || !std::isfinite(gain_floor)) {
    throw InvalidParameter("gain floor must be negative and finite");
  }
  if (!(tol > 0.0)) throw InvalidParameter("gain tolerance must be positive");

  GainSearchResult res;
  auto probe = [&](double g) {
    ++res.evaluations;
    return stability_verdict(params.with_gain(g));
  };

  const Verdict v0 = probe(0.0);
  res.scan.push_back({0.0, v0});
  if (stabilised(0.0, v0)) {
    res.gain = 0.0;
    res.unstable_gain = 0.0;
    return res;
  }
  // Stability need not be monotone in the gain, so scan the whole range
  // geometrically (ratio sqrt 2) instead of trusting the floor alone.
  for (double g = -0.25; g > gain_floor; g *= std::numbers::sqrt2) res.scan.push_back({g, probe(g)});
  res.scan.push_back({gain_floor, probe(gain_floor)});

  std::size_t bracket = 0;
  for (std::size_t k = 1; k < res.scan.size(); ++k) {
    const bool a = stabilised(res.scan[k - 1].gain, res.scan[k - 1].verdict);
    const bool b = stabilised(res.scan[k].gain, res.scan[k].verdict);
    if (a != b) {
      ++res.transitions;
      if (bracket == 0 && b) bracket = k;
    }
  }
  if (bracket == 0) {
    throw FloorInsufficient(gain_floor, "no control gain in [floor, 0] stabilises the pulse");
  }
  res.monotone = res.transitions == 1;

  double stable = res.scan[bracket].gain;
  double unstable = res.scan[bracket - 1].gain;
  while (unstable - stable > tol) {
    const double mid = 0.5 * (stable + unstable);
    if (stabilised(mid, probe(mid))) {
      stable = mid;
    } else {
      unstable = mid;
    }
  }
  res.gain = stable;
  res.unstable_gain = unstable;
  return res;
}

GainSearchResult min_control_gain_auto(const ModelParams& params, double gain_floor, double tol) {
  double floor = gain_floor;
  while (true) {
    try {
      return min_control_gain(params, floor, tol);
    } catch (const FloorInsufficient&) {
      if (floor <= kMaxGainFloor) throw;
      floor = std::max(2.0 * floor, kMaxGainFloor);
    }
  }
}

void SweepSpec::validate() const {
  if (n_f_der < 2 || n_nu < 2) throw InvalidParameter("sweep grid needs at least 2 points per axis");
  if (!(f_der_max > f_der_min) || !(nu_max > nu_min)) {
    throw InvalidParameter("sweep ranges must be increasing");
  }
  if (!(u_star > 0.0) || !(f_val > 0.0) || !(eps > 0.0)) {
    throw InvalidParameter("u_star, f_val and eps must be positive");
  }
  if (!(boundary_tol > 0.0) || !(gain_tol > 0.0)) {
    throw InvalidParameter("tolerances must be positive");
  }
}

double SweepSpec::f_der_at(std::size_t i) const {
  return f_der_min + (f_der_max - f_der_min) * (static_cast<double>(i) / static_cast<double>(n_f_der - 1));
}

double SweepSpec::nu_at(std::size_t j) const {
  return nu_min + (nu_max - nu_min) * (static_cast<double>(j) / static_cast<double>(n_nu - 1));
}

ModelParams plane_params(double f_der, double nu, const SweepSpec& spec) {
  ModelParams p;
  p.u_star = spec.u_star;
  p.f_val = spec.f_val;
  p.f_der = f_der;
  p.to_log_der = nu - 2.0 * f_der / spec.f_val;
  p.eps = spec.eps;
  p.control_slope = 0.0;
  return p;
}

bool uncontrolled_stable(const RegionCell& c) {
  return c.error.empty() && c.uncontrolled_verdict != Verdict::Unstable;
}

namespace {

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body) {
  unsigned t = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  t = static_cast<unsigned>(std::min<std::size_t>(t, std::max<std::size_t>(n, 1)));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) body(i);
  };
  if (t <= 1) {
    worker();
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(t);
  for (unsigned k = 0; k < t; ++k) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

// Critical eigenvalue: largest real part apart from the translation mode.
cplx critical_eigenvalue(const SpectrumReport& rep) {
  cplx best(-std::numeric_limits<double>::infinity(), 0.0);
  bool skipped = false;
  for (cplx l : rep.eigenvalues) {
    if (!skipped && l == rep.translation_eigenvalue) {
      skipped = true;
      continue;
    }
    if (l.real() > best.real()) best = l;
  }
  return best;
}

RegionCell evaluate_cell(double f_der, double nu, const SweepSpec& spec) {
  RegionCell c;
  c.f_der = f_der;
  c.nu = nu;
  c.theorem_class = classify_point(f_der, nu, spec.u_star);
  const ModelParams p = plane_params(f_der, nu, spec);
  try {
    const SpectrumReport rep = assemble_spectrum(p);
    c.uncontrolled_verdict = rep.verdict;
    c.max_real_part = rep.max_real_part;
  } catch (const std::exception& e) {
    c.error = e.what();
    return c;
  }
  if (spec.compute_min_gain && is_controllable(c.theorem_class) &&
      c.uncontrolled_verdict == Verdict::Unstable) {
    try {
      c.min_gain = min_control_gain_auto(p, spec.gain_floor, spec.gain_tol).gain;
    } catch (const std::exception& e) {
      c.gain_error = e.what();
    }
  }
  return c;
}

// The pulse degenerates where u* T_o'/T_o = 1; a real eigenvalue passes
// through zero there, so such nodes lie on the fold curve itself.
bool degenerate_node(const RegionCell& c, const SweepSpec& spec) {
  return !c.error.empty() && plane_params(c.f_der, c.nu, spec).to_log_der * spec.u_star == 1.0;
}

struct EdgeJob {
  std::size_t stable_cell;
  std::size_t unstable_cell;
};

}  // namespace

SweepResult sweep_plane(const SweepSpec& spec) {
  spec.validate();
  SweepResult out;
  out.spec = spec;
  const std::size_t nf = spec.n_f_der;
  const std::size_t nn = spec.n_nu;
  out.cells.resize(nf * nn);
  parallel_for(nf * nn, spec.threads, [&](std::size_t idx) {
    out.cells[idx] = evaluate_cell(spec.f_der_at(idx / nn), spec.nu_at(idx % nn), spec);
  });

  // Grid edges across which the uncontrolled verdict changes. The line
  // f' = 0 is degenerate rather than a bifurcation, so it is not traced.
  auto traceable = [&](std::size_t a) { return out.cells[a].error.empty() && out.cells[a].f_der != 0.0; };
  std::vector<EdgeJob> jobs;
  auto consider = [&](std::size_t a, std::size_t b) {
    if (!traceable(a) || !traceable(b)) return;
    const bool sa = uncontrolled_stable(out.cells[a]);
    const bool sb = uncontrolled_stable(out.cells[b]);
    if (sa == sb) return;
    jobs.push_back(sa ? EdgeJob{a, b} : EdgeJob{b, a});
  };
  for (std::size_t i = 0; i < nf; ++i) {
    for (std::size_t j = 0; j < nn; ++j) {
      const std::size_t a = i * nn + j;
      if (i + 1 < nf) consider(a, (i + 1) * nn + j);
      if (j + 1 < nn) consider(a, i * nn + j + 1);
    }
  }

  std::vector<std::optional<BoundaryCrossing>> found(jobs.size());
  parallel_for(jobs.size(), spec.threads, [&](std::size_t k) {
    const RegionCell& s = out.cells[jobs[k].stable_cell];
    const RegionCell& u = out.cells[jobs[k].unstable_cell];
    const double len = std::hypot(u.f_der - s.f_der, u.nu - s.nu);
    double ts = 0.0;
    double tu = 1.0;
    auto point = [&](double t) {
      return plane_params(s.f_der + t * (u.f_der - s.f_der), s.nu + t * (u.nu - s.nu), spec);
    };
    try {
      bool on_fold = false;
      while (!on_fold && (tu - ts) * len > spec.boundary_tol) {
        const double mid = 0.5 * (ts + tu);
        const ModelParams p = point(mid);
        if (p.u_star * p.to_log_der == 1.0) {
          // Landed exactly on the degenerate line, which is the fold itself.
          ts = tu = mid;
          on_fold = true;
        } else if (stability_verdict(p) != Verdict::Unstable) {
          ts = mid;
        } else {
          tu = mid;
        }
      }
      BoundaryCrossing c;
      const double t = 0.5 * (ts + tu);
      c.f_der = s.f_der + t * (u.f_der - s.f_der);
      c.nu = s.nu + t * (u.nu - s.nu);
      c.tag = BoundaryTag::Fold;
      if (!on_fold && std::abs(critical_eigenvalue(assemble_spectrum(point(tu))).imag()) > 1e-6) {
        c.tag = BoundaryTag::Hopf;
      }
      c.cell_a = jobs[k].stable_cell;
      c.cell_b = jobs[k].unstable_cell;
      found[k] = c;
    } catch (const std::exception&) {
      // Left untraced; the polyline simply breaks here.
    }
  });

  std::map<std::pair<std::size_t, std::size_t>, std::size_t> by_edge;
  for (const auto& c : found) {
    if (!c) continue;
    const auto key = std::minmax(c->cell_a, c->cell_b);
    by_edge[{key.first, key.second}] = out.crossings.size();
    out.crossings.push_back(*c);
    for (std::size_t cell : {c->cell_a, c->cell_b}) {
      auto& tag = out.cells[cell].boundary_tag;
      if (!tag || c->tag == BoundaryTag::Hopf) tag = c->tag;
    }
  }

  // Degenerate nodes separating valid stable and unstable neighbours are
  // fold points; every grid edge touching them maps to that point.
  for (std::size_t i = 0; i < nf; ++i) {
    for (std::size_t j = 0; j < nn; ++j) {
      const std::size_t d = i * nn + j;
      if (!degenerate_node(out.cells[d], spec)) continue;
      std::vector<std::size_t> nbrs;
      if (i > 0) nbrs.push_back(d - nn);
      if (i + 1 < nf) nbrs.push_back(d + nn);
      if (j > 0) nbrs.push_back(d - 1);
      if (j + 1 < nn) nbrs.push_back(d + 1);
      std::optional<std::size_t> st, un;
      for (std::size_t b : nbrs) {
        if (!traceable(b)) continue;
        (uncontrolled_stable(out.cells[b]) ? st : un) = b;
      }
      if (!st || !un) continue;
      BoundaryCrossing c;
      c.f_der = out.cells[d].f_der;
      c.nu = out.cells[d].nu;
      c.tag = BoundaryTag::Fold;
      c.cell_a = *st;
      c.cell_b = *un;
      const std::size_t id = out.crossings.size();
      out.crossings.push_back(c);
      out.cells[d].boundary_tag = BoundaryTag::Fold;
      for (std::size_t b : nbrs) {
        const auto key = std::minmax(d, b);
        by_edge[{key.first, key.second}] = id;
      }
    }
  }

  // A boundary through a grid node yields one crossing per incident edge;
  // merge those so the square walk sees a single point.
  {
    const double df = (spec.f_der_max - spec.f_der_min) / static_cast<double>(nf - 1);
    const double dn = (spec.nu_max - spec.nu_min) / static_cast<double>(nn - 1);
    const double snap = 10.0 * spec.boundary_tol;
    std::map<std::pair<long, long>, std::size_t> at_node;
    std::vector<std::size_t> remap(out.crossings.size());
    std::vector<BoundaryCrossing> merged;
    for (std::size_t k = 0; k < out.crossings.size(); ++k) {
      const auto& c = out.crossings[k];
      const double gi = (c.f_der - spec.f_der_min) / df;
      const double gj = (c.nu - spec.nu_min) / dn;
      const long ni = std::lround(gi);
      const long nj = std::lround(gj);
      if (std::hypot((gi - ni) * df, (gj - nj) * dn) < snap) {
        auto [it, fresh] = at_node.try_emplace({ni, nj}, merged.size());
        if (fresh) {
          merged.push_back(c);
          merged.back().f_der = spec.f_der_at(static_cast<std::size_t>(ni));
          merged.back().nu = spec.nu_at(static_cast<std::size_t>(nj));
        } else if (c.tag == BoundaryTag::Hopf) {
          merged[it->second].tag = BoundaryTag::Hopf;
        }
        remap[k] = it->second;
      } else {
        remap[k] = merged.size();
        merged.push_back(c);
      }
    }
    for (auto& [edge, id] : by_edge) id = remap[id];
    out.crossings = std::move(merged);
  }

  // Marching squares: connect crossings that share a grid square.
  std::vector<std::vector<std::size_t>> adj(out.crossings.size());
  auto edge_id = [&](std::size_t a, std::size_t b) -> std::optional<std::size_t> {
    const auto key = std::minmax(a, b);
    auto it = by_edge.find({key.first, key.second});
    if (it == by_edge.end()) return std::nullopt;
    return it->second;
  };
  auto link = [&](std::size_t x, std::size_t y) {
    if (out.crossings[x].tag != out.crossings[y].tag) return;
    adj[x].push_back(y);
    adj[y].push_back(x);
  };
  for (std::size_t i = 0; i + 1 < nf; ++i) {
    for (std::size_t j = 0; j + 1 < nn; ++j) {
      const std::size_t c00 = i * nn + j, c10 = (i + 1) * nn + j;
      const std::size_t c11 = (i + 1) * nn + j + 1, c01 = i * nn + j + 1;
      // Counter-clockwise: bottom, right, top, left.
      std::vector<std::size_t> ids;
      for (auto e : {edge_id(c00, c10), edge_id(c10, c11), edge_id(c01, c11), edge_id(c00, c01)}) {
        if (e && std::find(ids.begin(), ids.end(), *e) == ids.end()) ids.push_back(*e);
      }
      if (ids.size() == 2) {
        link(ids[0], ids[1]);
      } else if (ids.size() == 4) {
        link(ids[0], ids[1]);
        link(ids[2], ids[3]);
      }
    }
  }

  std::vector<bool> used(out.crossings.size(), false);
  auto walk = [&](std::size_t start) {
    Polyline line;
    line.tag = out.crossings[start].tag;
    std::size_t prev = start;
    std::size_t cur = start;
    used[cur] = true;
    line.points.emplace_back(out.crossings[cur].f_der, out.crossings[cur].nu);
    while (true) {
      std::optional<std::size_t> next;
      for (std::size_t n : adj[cur]) {
        if (n != prev && !used[n]) {
          next = n;
          break;
        }
      }
      if (!next) {
        // Close cycles explicitly.
        for (std::size_t n : adj[cur]) {
          if (n == start && line.points.size() > 2) {
            line.points.emplace_back(out.crossings[start].f_der, out.crossings[start].nu);
            break;
          }
        }
        break;
      }
      prev = cur;
      cur = *next;
      used[cur] = true;
      line.points.emplace_back(out.crossings[cur].f_der, out.crossings[cur].nu);
    }
    out.polylines.push_back(std::move(line));
  };
  for (std::size_t k = 0; k < out.crossings.size(); ++k) {
    if (!used[k] && adj[k].size() <= 1) walk(k);
  }
  for (std::size_t k = 0; k < out.crossings.size(); ++k) {
    if (!used[k]) walk(k);
  }
  return out;
}

}  // namespace pulsectl
