#include <cmath>
#include <sstream>

#include "doctest.h"
#include "supportfit/errors.hpp"
#include "supportfit/harness.hpp"
#include "supportfit/io.hpp"
#include "supportfit/sphere.hpp"

using namespace supportfit;

namespace {

Point pt(std::initializer_list<double> xs) {
  Point p(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index k = 0;
  for (double x : xs) p[k++] = x;
  return p;
}

}  // namespace

TEST_CASE("polytope json round trip") {
  const Polytope p = benchmark_truth("pentagon", 2, 1.0);
  const Body back = body_from_json(Json::parse(body_to_json(p).dump()));
  REQUIRE(std::holds_alternative<Polytope>(back));
  const Polytope& q = std::get<Polytope>(back);
  REQUIRE(q.size() == p.size());
  CHECK(q.vertices() == p.vertices());
}

TEST_CASE("cap body json round trip") {
  const CapBody b(3, 1.5, {{Direction(pt({0, 0, 1})), 0.1, true}, {Direction(pt({1, 0, 0})), 0.05, false}});
  const Body back = body_from_json(body_to_json(b));
  REQUIRE(std::holds_alternative<CapBody>(back));
  const CapBody& c = std::get<CapBody>(back);
  CHECK(c.dim() == 3);
  CHECK(c.gamma() == 1.5);
  REQUIRE(c.caps().size() == 2);
  CHECK(c.caps()[1].truncated == false);
  Rng rng(1);
  for (int k = 0; k < 100; ++k) {
    const Direction u = uniform_direction(rng, 3);
    CHECK(support_cap_body(c, u) == support_cap_body(b, u));
  }
}

TEST_CASE("cap body json without dim") {
  const Json with_caps = Json::parse(R"({"type":"cap_body","gamma":1,"caps":[{"axis":[0,2],"eta":0.1}]})");
  const CapBody b = std::get<CapBody>(body_from_json(with_caps));
  CHECK(b.dim() == 2);
  CHECK(b.caps()[0].truncated);
  CHECK(b.caps()[0].axis[1] == 1.0);
  CHECK_THROWS_AS(body_from_json(Json::parse(R"({"type":"cap_body","gamma":1,"caps":[]})")), MalformedInput);
  const Json empty = Json::parse(R"({"type":"cap_body","dim":4,"gamma":1,"caps":[]})");
  CHECK(std::get<CapBody>(body_from_json(empty)).dim() == 4);
}

TEST_CASE("malformed body json") {
  for (const char* text : {R"({"vertices":[[1,0]]})",
                           R"({"type":"sphere"})",
                           R"({"type":"polytope","vertices":[[1,0],[0,1,2]]})",
                           R"({"type":"polytope","dim":3,"vertices":[[1,0]]})",
                           R"({"type":"polytope","vertices":[["a",0]]})",
                           R"({"type":"cap_body","caps":[{"axis":[0,1],"eta":0.1}]})"}) {
    CAPTURE(text);
    CHECK_THROWS_AS(body_from_json(Json::parse(text)), MalformedInput);
  }
  CHECK_THROWS_AS(family_from_json(Json::parse(R"({"type":"polytope"})")), MalformedInput);
  CHECK_THROWS_AS(
      family_from_json(Json::parse(R"([{"type":"cap_body","dim":2,"gamma":1,"caps":[]}])")),
      MalformedInput);
  CHECK(family_from_json(Json::parse(R"([{"type":"polytope","vertices":[[1,0]]}])")).size() == 1);
  CHECK_THROWS_AS(read_json_file("/nonexistent/body.json"), MalformedInput);
}

TEST_CASE("packing json") {
  Rng rng(3);
  const PackingSet pack = maximal_packing(rng, 3, 0.8);
  const Json j = packing_to_json(pack);
  CHECK(j.at("dim") == 3);
  CHECK(j.at("epsilon") == 0.8);
  CHECK(j.at("points").size() == pack.size());
  CHECK(j.at("points")[0][2].get<double>() == pack.points[0][2]);
}

TEST_CASE("measurement csv round trip") {
  const MeasurementSet data =
      generate_data(benchmark_truth("square", 2, 1.0), DesignSpec{DesignKind::Uniform, 0.1}, 2, 25, 0.2, 1.0, 4);
  std::stringstream ss;
  write_measurements_csv(ss, data);
  const std::string text = ss.str();
  CHECK(text.rfind("u_1,u_2,y\n", 0) == 0);
  CHECK(text.find('\r') == std::string::npos);
  const MeasurementSet back = read_measurements_csv(ss, 0.2, 1.0);
  REQUIRE(back.size() == data.size());
  CHECK(back.values == data.values);
  for (std::size_t i = 0; i < data.size(); ++i) CHECK(back.directions[i].coords() == data.directions[i].coords());
}

TEST_CASE("measurement csv parsing") {
  std::istringstream crlf("u_1,u_2,u_3,y\r\n0,0,1,0.5\r\n\r\n1,0,0,-0.25\r\n");
  const MeasurementSet d3 = read_measurements_csv(crlf, 0.1, 1.0);
  CHECK(d3.size() == 2);
  CHECK(d3.dim() == 3);
  CHECK(d3.values[1] == -0.25);

  std::istringstream rounded("u_1,u_2,y\n0.7071067812,0.7071067812,1\n");
  const MeasurementSet r = read_measurements_csv(rounded, 0.1, 1.0);
  CHECK(std::abs(r.directions[0].coords().norm() - 1.0) <= 1e-15);

  for (const char* text : {"", "u_1,y\n1,0\n", "u_1,u_2,y\n1,0\n", "u_1,u_2,y\n1,0,x\n", "u_1,u_2,y\n1,0,1.5abc\n",
                           "u_1,u_2,y\n0.9,0,1\n", "u_1,u_2,y\n"}) {
    CAPTURE(text);
    std::istringstream is(text);
    CHECK_THROWS_AS(read_measurements_csv(is, 0.1, 1.0), MalformedInput);
  }
  std::istringstream ok("u_1,u_2,y\n1,0,1\n");
  CHECK_THROWS_AS(read_measurements_csv(ok, -1.0, 1.0), ParameterError);
}

TEST_CASE("fit result json") {
  const MeasurementSet data =
      generate_data(benchmark_truth("square", 2, 1.0), evenly_spaced_circle(12), 0.0, 1.0, 1);
  const FitResult fit = fit_ls_2d(data);
  const Json j = fit_result_to_json(fit);
  CHECK(j.at("vertices").size() == fit.polytope.size());
  CHECK(j.at("fitted_values").size() == 12);
  CHECK(j.at("objective").get<double>() == fit.objective);
  CHECK(j.at("diagnostics").at("estimator") == fit.diagnostics.estimator);
  CHECK(j.at("diagnostics").at("certified").get<bool>());
}
