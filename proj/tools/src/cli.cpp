// SPDX-License-Identifier: Apache-2.0

#include "pulsectl/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "pulsectl/error.hpp"
#include "pulsectl/json_io.hpp"
#include "pulsectl/model.hpp"
#include "pulsectl/oracle.hpp"
#include "pulsectl/pde_sim.hpp"
#include "pulsectl/regions.hpp"
#include "pulsectl/spectral.hpp"
#include "pulsectl/version.hpp"

namespace pulsectl::cli {

namespace {

// Bad config files are usage errors, not domain errors.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Options that may also come from the --config file under the same name
// with dashes replaced by underscores. Explicit flags win.
class Mergeable {
public:
  template <class T>
  CLI::Option* add(CLI::App* app, const std::string& flag, T& var, const std::string& help) {
    CLI::Option* opt = app->add_option(flag, var, help)->capture_default_str();
    register_key(flag, opt, [&var](const json& j) { var = j.get<T>(); });
    return opt;
  }

  CLI::Option* add_flag(CLI::App* app, const std::string& flag, bool& var, const std::string& help) {
    CLI::Option* opt = app->add_flag(flag, var, help);
    register_key(flag, opt, [&var](const json& j) { var = j.get<bool>(); });
    return opt;
  }

  void merge(const std::string& path) const {
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config file " + path);
    json cfg;
    try {
      in >> cfg;
    } catch (const json::exception& e) {
      throw UsageError("config file is not valid JSON: " + std::string(e.what()));
    }
    if (!cfg.is_object()) throw UsageError("config file must hold a JSON object");
    for (auto it = cfg.begin(); it != cfg.end(); ++it) {
      const Entry* entry = nullptr;
      for (const auto& e : entries_) {
        if (e.key == it.key()) entry = &e;
      }
      if (entry == nullptr) throw UsageError("unknown config field '" + it.key() + "'");
      if (entry->opt->count() > 0) continue;
      try {
        entry->assign(it.value());
      } catch (const json::exception&) {
        throw UsageError("config field '" + it.key() + "' has the wrong type");
      }
    }
  }

private:
  struct Entry {
    std::string key;
    CLI::Option* opt;
    std::function<void(const json&)> assign;
  };

  void register_key(const std::string& flag, CLI::Option* opt, std::function<void(const json&)> fn) {
    std::string key = flag.substr(flag.find_first_not_of('-'));
    for (char& c : key) {
      if (c == '-') c = '_';
    }
    entries_.push_back({key, opt, std::move(fn)});
  }

  std::vector<Entry> entries_;
};

struct PointOptions {
  ModelParams params;
  double gain = 0.0;

  void add(Mergeable& m, CLI::App* app) {
    m.add(app, "--u-star", params.u_star, "pulse amplitude u*");
    m.add(app, "--f-val", params.f_val, "f(u*)");
    m.add(app, "--f-der", params.f_der, "f'(u*)");
    m.add(app, "--to-log-der", params.to_log_der, "T_o'(u*)/T_o(u*)");
    m.add(app, "--eps", params.eps, "scale separation");
    m.add(app, "--gain", gain, "control slope l'(0)");
  }

  ModelParams resolved() const { return params.with_gain(gain); }
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << content;
  if (!f) throw std::runtime_error("failed writing " + path);
}

void write_manifest(const std::string& out_path, const RunManifest& m) {
  write_file(out_path + ".manifest.json", to_json(m).dump(2) + "\n");
}

void parse_pair(const std::string& s, double& a, double& b, const char* what) {
  std::istringstream in(s);
  char comma = 0;
  if (!(in >> a >> comma >> b) || comma != ',' || !in.eof()) {
    throw UsageError(std::string(what) + " must look like LO,HI");
  }
}

void parse_grid(const std::string& s, std::size_t& nf, std::size_t& nn) {
  const auto x = s.find('x');
  try {
    std::size_t used = 0;
    if (x == std::string::npos) {
      nf = nn = std::stoul(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
    } else {
      nf = std::stoul(s.substr(0, x), &used);
      if (used != x) throw std::invalid_argument(s);
      const std::string rest = s.substr(x + 1);
      nn = std::stoul(rest, &used);
      if (used != rest.size()) throw std::invalid_argument(s);
    }
  } catch (const std::logic_error&) {
    throw UsageError("--grid must be N or NxM");
  }
}

// ---------------------------------------------------------------- spectrum

struct SpectrumCmd {
  PointOptions point;
  bool min_gain = false;
  double gain_floor = kDefaultGainFloor;
  double tol = kDefaultGainTol;
  std::string out;

  void add(Mergeable& m, CLI::App* app) {
    point.add(m, app);
    m.add_flag(app, "--min-gain", min_gain, "also search the least negative stabilising gain");
    m.add(app, "--gain-floor", gain_floor, "deepest gain scanned by --min-gain");
    m.add(app, "--tol", tol, "gain bisection tolerance");
    app->add_option("--out", out, "write the JSON report to this file");
  }

  int run(std::ostream& os) const {
    const ModelParams p = point.resolved();
    p.validate();
    json params = p;
    params["min_gain"] = min_gain;
    params["gain_floor"] = gain_floor;
    params["tol"] = tol;
    const RunManifest man = make_manifest("spectrum", params);

    json doc;
    doc["manifest"] = to_json(man);
    doc["theorem_class"] = to_string(classify_theorem(p));
    doc["spectrum"] = assemble_spectrum(p);
    if (min_gain) doc["min_control_gain"] = min_control_gain_auto(p, gain_floor, tol);
    const std::string text = doc.dump(2) + "\n";
    os << text;
    if (!out.empty()) {
      write_file(out, text);
      write_manifest(out, man);
    }
    return kExitOk;
  }
};

// ------------------------------------------------------------------ region

struct RegionCmd {
  SweepSpec spec;
  std::string grid = "121";
  std::string f_range = "-3,3";
  std::string nu_range = "-3,3";
  bool no_min_gain = false;
  std::string out;

  void add(Mergeable& m, CLI::App* app) {
    m.add(app, "--grid", grid, "grid points N or NxM over (f_der, nu)");
    m.add(app, "--f-range", f_range, "f_der range LO,HI");
    m.add(app, "--nu-range", nu_range, "nu range LO,HI");
    m.add(app, "--u-star", spec.u_star, "pulse amplitude u*");
    m.add(app, "--f-val", spec.f_val, "f(u*)");
    m.add(app, "--eps", spec.eps, "scale separation");
    m.add(app, "--threads", spec.threads, "worker threads (0: all cores)");
    m.add_flag(app, "--no-min-gain", no_min_gain, "skip the per-cell gain search");
    m.add(app, "--gain-floor", spec.gain_floor, "initial gain floor of the search");
    m.add(app, "--tol", spec.gain_tol, "gain bisection tolerance");
    m.add(app, "--boundary-tol", spec.boundary_tol, "boundary bisection tolerance");
    app->add_option("--out", out, "CSV of cells; polylines go to <out>.polylines.json");
  }

  int run(std::ostream& os) {
    parse_grid(grid, spec.n_f_der, spec.n_nu);
    parse_pair(f_range, spec.f_der_min, spec.f_der_max, "--f-range");
    parse_pair(nu_range, spec.nu_min, spec.nu_max, "--nu-range");
    spec.compute_min_gain = !no_min_gain;
    spec.validate();
    // Thread count does not change results, so it stays out of the hash.
    const json params = {{"grid", {spec.n_f_der, spec.n_nu}},
                         {"f_range", {spec.f_der_min, spec.f_der_max}},
                         {"nu_range", {spec.nu_min, spec.nu_max}},
                         {"u_star", spec.u_star},
                         {"f_val", spec.f_val},
                         {"eps", spec.eps},
                         {"min_gain", spec.compute_min_gain},
                         {"gain_floor", spec.gain_floor},
                         {"tol", spec.gain_tol},
                         {"boundary_tol", spec.boundary_tol}};
    const RunManifest man = make_manifest("region", params);
    const SweepResult res = sweep_plane(spec);

    std::size_t stable = 0, errors = 0, gain_errors = 0;
    std::string csv = "f_der,nu,theorem_class,uncontrolled_verdict,max_real_part,min_gain\n";
    for (const RegionCell& c : res.cells) {
      stable += uncontrolled_stable(c) ? 1 : 0;
      errors += c.error.empty() ? 0 : 1;
      gain_errors += c.gain_error.empty() ? 0 : 1;
      csv += format_g17(c.f_der) + "," + format_g17(c.nu) + "," + to_string(c.theorem_class) + ",";
      csv += (c.error.empty() ? to_string(c.uncontrolled_verdict) : std::string("Error")) + ",";
      csv += (c.error.empty() ? format_g17(c.max_real_part) : std::string()) + ",";
      csv += (c.min_gain ? format_g17(*c.min_gain) : std::string()) + "\n";
    }
    json polylines = json::array();
    for (const Polyline& p : res.polylines) polylines.push_back(p);

    json doc;
    doc["manifest"] = to_json(man);
    doc["summary"] = {{"cells", res.cells.size()},
                      {"uncontrolled_stable", stable},
                      {"cell_errors", errors},
                      {"gain_search_failures", gain_errors},
                      {"boundary_points", res.crossings.size()}};
    doc["polylines"] = polylines;
    os << doc.dump(2) << "\n";
    if (!out.empty()) {
      write_file(out, csv);
      json pl;
      pl["manifest"] = to_json(man);
      pl["polylines"] = polylines;
      write_file(out + ".polylines.json", pl.dump(2) + "\n");
      write_manifest(out, man);
    }
    return kExitOk;
  }
};

// ---------------------------------------------------------------- simulate

struct SimulateCmd {
  PointOptions point;
  double t_end = 30.0;
  double eta = 1e-4;
  std::int64_t seed = -1;
  double dt = 0.0;
  double dx = 0.0;
  double half_length = 10.0;
  std::string out;

  void add(Mergeable& m, CLI::App* app) {
    point.add(m, app);
    m.add(app, "--t-end", t_end, "final time");
    m.add(app, "--eta", eta, "perturbation amplitude");
    m.add(app, "--seed", seed, "random perturbation seed (negative: even bump)");
    m.add(app, "--dt", dt, "time step (0: eps/40)");
    m.add(app, "--dx", dx, "grid spacing (0: eps/4)");
    m.add(app, "--half-length", half_length, "domain half-length L");
    app->add_option("--out", out, "CSV time series t,deviation_norm");
  }

  int run(std::ostream& os) const {
    SimConfig cfg = SimConfig::from_params(point.resolved());
    cfg.t_end = t_end;
    cfg.eta = eta;
    cfg.dt = dt;
    cfg.dx = dx;
    cfg.half_length = half_length;
    if (seed >= 0) {
      cfg.shape = PerturbationShape::Random;
      cfg.seed = static_cast<std::uint64_t>(seed);
    }
    cfg.validate();
    const RunManifest man = make_manifest("simulate", cfg);
    const SimTrace trace = run_simulation(cfg);

    json doc;
    doc["manifest"] = to_json(man);
    doc["config"] = cfg;
    doc["result"] = trace;
    doc["verdict"] = trace.fit_r2 > 0.99 ? (trace.fitted_rate > 0.0 ? "Unstable" : "Stable") : "Inconclusive";
    try {
      const SpectrumReport rep = assemble_spectrum(cfg.params);
      doc["spectral"] = {{"verdict", to_string(rep.verdict)}, {"max_real_part", rep.max_real_part}};
    } catch (const Error& e) {
      doc["spectral"] = {{"error", e.what()}};
    }
    os << doc.dump(2) << "\n";
    if (!out.empty()) {
      std::string csv = "t,deviation_norm\n";
      for (std::size_t i = 0; i < trace.times.size(); ++i) {
        csv += format_g17(trace.times[i]) + "," + format_g17(trace.deviation_norms[i]) + "\n";
      }
      write_file(out, csv);
      write_manifest(out, man);
    }
    return kExitOk;
  }

  static SimTrace run_simulation(const SimConfig& cfg) { return pulsectl::run(cfg); }
};

// ------------------------------------------------------------------ verify

struct VerifyCmd {
  std::string out;

  void add(Mergeable&, CLI::App* app) {
    app->add_option("--out", out, "write the JSON report to this file");
  }

  int run(std::ostream& os) const {
    const FastGrid grid;
    json checks = json::array();
    bool all = true;
    auto push = [&](const std::string& name, double computed, double reference, double tol) {
      IdentityCheck c;
      c.name = name;
      c.computed = computed;
      c.reference = reference;
      c.abs_error = std::abs(computed - reference);
      c.tolerance = tol;
      c.pass = c.abs_error <= tol;
      all = all && c.pass;
      checks.push_back(c);
    };
    for (const IdentityCheck& c : eigenfunction_identities(grid)) {
      all = all && c.pass;
      checks.push_back(c);
    }
    const auto top = top_eigenvalues(FastOperator::build(grid), 3);
    const double expected[] = {1.25, 0.0, -0.75};
    for (std::size_t i = 0; i < 3; ++i) {
      push("L_f eigenvalue " + std::to_string(i), top[i], expected[i], 1e-3);
    }
    for (double mu : {-1.5, -2.0, -5.0}) {
      push("<theta(" + format_g17(mu) + "),v_p>", theta_inner_product(mu, grid).real(),
           theta_inner_product_exact(mu), 1e-6);
    }
    for (cplx z : {cplx(2.0, 0.0), cplx(3.0, 1.0), cplx(0.5, 4.0)}) {
      const std::string at = "(" + format_g17(z.real()) + "," + format_g17(z.imag()) + ")";
      for (int mode : {0, 2}) {
        push("resolvent identity psi" + std::to_string(mode) + " at " + at,
             resolvent_identity_residual(z, mode, grid), 0.0, 1e-8);
      }
      const cplx diff = r_total(z).total - r_oracle(z, grid);
      push("closed form vs oracle at " + at, std::abs(diff), 0.0, 1e-4);
    }
    const RunManifest man = make_manifest("verify", json{{"grid", {grid.xi_min, grid.xi_max, grid.n}}});
    json doc;
    doc["manifest"] = to_json(man);
    doc["checks"] = checks;
    doc["all_pass"] = all;
    const std::string text = doc.dump(2) + "\n";
    os << text;
    if (!out.empty()) {
      write_file(out, text);
      write_manifest(out, man);
    }
    return all ? kExitOk : kExitNumerical;
  }
};

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stability of singular pulses under proportional control", "pulsectl"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  std::string config;
  app.add_option("--config", config, "JSON file with defaults for any long flag (flags win)");

  Mergeable ms, mr, msim, mv;
  SpectrumCmd spectrum;
  RegionCmd region;
  SimulateCmd simulate;
  VerifyCmd verify;

  CLI::App* s_spec = app.add_subcommand("spectrum", "point spectrum and stability verdict");
  CLI::App* s_reg = app.add_subcommand("region", "sweep the (f_der, nu) plane");
  CLI::App* s_sim = app.add_subcommand("simulate", "time-domain perturbation growth");
  CLI::App* s_ver = app.add_subcommand("verify", "oracle and identity checks");
  for (CLI::App* sub : {s_spec, s_reg, s_sim, s_ver}) {
    sub->add_option("--config", config, "JSON file with defaults for any long flag (flags win)");
  }
  spectrum.add(ms, s_spec);
  region.add(mr, s_reg);
  simulate.add(msim, s_sim);
  verify.add(mv, s_ver);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (s_spec->parsed()) {
      ms.merge(config);
      return spectrum.run(out);
    }
    if (s_reg->parsed()) {
      mr.merge(config);
      return region.run(out);
    }
    if (s_sim->parsed()) {
      msim.merge(config);
      return simulate.run(out);
    }
    mv.merge(config);
    return verify.run(out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace pulsectl::cli
