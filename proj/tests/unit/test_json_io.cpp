#include <doctest.h>

#include "pulsectl/error.hpp"
#include "pulsectl/json_io.hpp"

using namespace pulsectl;

TEST_CASE("model params round trip") {
  ModelParams p;
  p.u_star = 1.25;
  p.f_der = -0.1;
  p.to_log_der = 0.3;
  p.control_slope = -2.0;
  const json j = p;
  CHECK(j.get<ModelParams>() == p);
  CHECK(json::parse(j.dump()).get<ModelParams>() == p);
}

TEST_CASE("partial objects keep defaults") {
  const ModelParams p = json{{"f_der", -3.0}}.get<ModelParams>();
  CHECK(p.f_der == -3.0);
  CHECK(p.u_star == ModelParams{}.u_star);
  CHECK(p.eps == ModelParams{}.eps);
}

TEST_CASE("unknown keys are rejected") {
  CHECK_THROWS_AS(json({{"f_derr", 1.0}}).get<ModelParams>(), InvalidParameter);
  CHECK_THROWS_AS(json({{"phi", 1.0}, {"x", 0}}).get<PowerLawModel>(), InvalidParameter);
  CHECK_THROWS_AS(json::array().get<ModelParams>(), InvalidParameter);
  CHECK_THROWS_AS(json({{"t_end", 1.0}, {"bogus", 1}}).get<SimConfig>(), InvalidParameter);
}

TEST_CASE("power law and sim config") {
  PowerLawModel m;
  m.phi = 2.0;
  m.gamma = -1.5;
  m.delta = 0.5;
  CHECK(json(m).get<PowerLawModel>() == m);

  ModelParams p;
  p.f_der = -3.0;
  p.to_log_der = 8.0;
  const SimConfig c = json{{"params", p}, {"t_end", 5.0}, {"shape", "Random"}, {"seed", 7}}.get<SimConfig>();
  CHECK(c.t_end == 5.0);
  CHECK(c.shape == PerturbationShape::Random);
  CHECK(c.seed == 7);
  CHECK(c.model == PowerLawModel::from_params(p));
  const SimConfig back = json(c).get<SimConfig>();
  CHECK(back.params == c.params);
  CHECK(back.model == c.model);
  CHECK(back.t_end == c.t_end);
}

TEST_CASE("report serialisation") {
  CHECK(complex_to_json({1.5, -2.0}) == json::array({1.5, -2.0}));

  RegionCell cell;
  cell.f_der = -1.0;
  json j = cell;
  CHECK(j["boundary_tag"].is_null());
  CHECK(j["min_gain"].is_null());
  CHECK_FALSE(j.contains("error"));
  cell.min_gain = -2.5;
  cell.boundary_tag = BoundaryTag::Hopf;
  cell.error = "x";
  j = cell;
  CHECK(j["min_gain"] == -2.5);
  CHECK(j["boundary_tag"] == "Hopf");
  CHECK(j["error"] == "x");

  Polyline pl;
  pl.tag = BoundaryTag::Fold;
  pl.points = {{0.0, 1.0}, {0.5, 1.5}};
  const json pj = pl;
  CHECK(pj["tag"] == "Fold");
  CHECK(pj["points"].size() == 2);
}
