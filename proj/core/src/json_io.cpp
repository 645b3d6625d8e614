// SPDX-License-Identifier: Apache-2.0

#include "pulsectl/json_io.hpp"

#include <algorithm>

#include "pulsectl/error.hpp"

namespace pulsectl {

namespace {

template <class T>
void read_opt(const json& j, const char* key, T& out) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw InvalidParameter(std::string("field '") + key + "' has the wrong type");
  }
}

}  // namespace

void require_known_keys(const json& j, std::initializer_list<const char*> allowed,
                        const std::string& what) {
  if (!j.is_object()) throw InvalidParameter(what + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* k) { return it.key() == k; });
    if (!known) throw InvalidParameter("unknown field '" + it.key() + "' in " + what);
  }
}

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

void to_json(json& j, const ModelParams& p) {
  j = json{{"u_star", p.u_star},         {"f_val", p.f_val}, {"f_der", p.f_der},
           {"to_log_der", p.to_log_der}, {"eps", p.eps},     {"control_slope", p.control_slope}};
}

void from_json(const json& j, ModelParams& p) {
  require_known_keys(j, {"u_star", "f_val", "f_der", "to_log_der", "eps", "control_slope"},
                     "model parameters");
  read_opt(j, "u_star", p.u_star);
  read_opt(j, "f_val", p.f_val);
  read_opt(j, "f_der", p.f_der);
  read_opt(j, "to_log_der", p.to_log_der);
  read_opt(j, "eps", p.eps);
  read_opt(j, "control_slope", p.control_slope);
}

void to_json(json& j, const PowerLawModel& m) {
  j = json{{"phi", m.phi}, {"gamma", m.gamma}, {"delta", m.delta}, {"u_star", m.u_star}};
}

void from_json(const json& j, PowerLawModel& m) {
  require_known_keys(j, {"phi", "gamma", "delta", "u_star"}, "power-law model");
  read_opt(j, "phi", m.phi);
  read_opt(j, "gamma", m.gamma);
  read_opt(j, "delta", m.delta);
  read_opt(j, "u_star", m.u_star);
}

void to_json(json& j, const Rect& r) {
  j = json{{"re_min", r.re_min}, {"re_max", r.re_max}, {"im_min", r.im_min}, {"im_max", r.im_max}};
}

void to_json(json& j, const SpectrumReport& r) {
  json eig = json::array();
  for (cplx l : r.eigenvalues) eig.push_back(complex_to_json(l));
  j = json{{"eigenvalues", eig},
           {"translation_eigenvalue", complex_to_json(r.translation_eigenvalue)},
           {"essential_edge", r.essential_edge},
           {"essential_edge_hat", r.essential_edge_hat},
           {"verdict", to_string(r.verdict)},
           {"max_real_part", r.max_real_part},
           {"search_window", r.search_window},
           {"diagnostics",
            {{"function_evaluations", r.diagnostics.function_evaluations},
             {"winding_total", r.diagnostics.winding_total},
             {"cells_examined", r.diagnostics.cells_examined}}}};
}

void to_json(json& j, const GainSearchResult& g) {
  json scan = json::array();
  for (const auto& s : g.scan) scan.push_back({{"gain", s.gain}, {"verdict", to_string(s.verdict)}});
  j = json{{"gain", g.gain},
           {"unstable_gain", g.unstable_gain},
           {"monotone", g.monotone},
           {"transitions", g.transitions},
           {"evaluations", g.evaluations},
           {"scan", scan}};
}

void to_json(json& j, const RegionCell& c) {
  j = json{{"f_der", c.f_der},
           {"nu", c.nu},
           {"theorem_class", to_string(c.theorem_class)},
           {"uncontrolled_verdict", to_string(c.uncontrolled_verdict)},
           {"max_real_part", c.max_real_part}};
  j["boundary_tag"] = c.boundary_tag ? json(to_string(*c.boundary_tag)) : json(nullptr);
  j["min_gain"] = c.min_gain ? json(*c.min_gain) : json(nullptr);
  if (!c.error.empty()) j["error"] = c.error;
  if (!c.gain_error.empty()) j["gain_error"] = c.gain_error;
}

void to_json(json& j, const Polyline& p) {
  json pts = json::array();
  for (const auto& [f, n] : p.points) pts.push_back(json::array({f, n}));
  j = json{{"tag", to_string(p.tag)}, {"points", pts}};
}

void to_json(json& j, const SimConfig& c) {
  j = json{{"model", c.model},
           {"params", c.params},
           {"half_length", c.half_length},
           {"dx", c.grid_dx()},
           {"dt", c.grid_dt()},
           {"t_end", c.t_end},
           {"eta", c.eta},
           {"shape", to_string(c.shape)},
           {"seed", c.seed},
           {"record_every", c.recording_stride()}};
}

void from_json(const json& j, SimConfig& c) {
  require_known_keys(j,
                     {"model", "params", "half_length", "dx", "dt", "t_end", "eta", "shape", "seed",
                      "record_every"},
                     "simulation config");
  if (j.contains("params")) c.params = j.at("params").get<ModelParams>();
  if (j.contains("model")) {
    c.model = j.at("model").get<PowerLawModel>();
  } else {
    c.model = PowerLawModel::from_params(c.params);
  }
  read_opt(j, "half_length", c.half_length);
  read_opt(j, "dx", c.dx);
  read_opt(j, "dt", c.dt);
  read_opt(j, "t_end", c.t_end);
  read_opt(j, "eta", c.eta);
  read_opt(j, "seed", c.seed);
  read_opt(j, "record_every", c.record_every);
  if (j.contains("shape")) {
    std::string s;
    read_opt(j, "shape", s);
    c.shape = perturbation_shape_from_string(s);
  }
}

void to_json(json& j, const SimTrace& t) {
  j = json{{"fitted_rate", t.fitted_rate},
           {"fit_r2", t.fit_r2},
           {"fit_window", json::array({t.fit_t_begin, t.fit_t_end})},
           {"exit", to_string(t.exit)},
           {"samples", t.times.size()},
           {"t_last", t.times.empty() ? 0.0 : t.times.back()},
           {"relaxation_residual", t.relaxation_residual},
           {"relaxation_iterations", t.relaxation_iterations}};
}

void to_json(json& j, const IdentityCheck& c) {
  j = json{{"name", c.name},
           {"computed", c.computed},
           {"reference", c.reference},
           {"abs_error", c.abs_error},
           {"tolerance", c.tolerance},
           {"pass", c.pass}};
}

}  // namespace pulsectl
