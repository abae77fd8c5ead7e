#include "supportfit/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "supportfit/errors.hpp"
#include "supportfit/harness.hpp"

namespace supportfit {

namespace {

Json point_json(const Point& p) {
  Json arr = Json::array();
  for (Eigen::Index k = 0; k < p.size(); ++k) arr.push_back(p[k]);
  return arr;
}

Point point_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw MalformedInput("expected a nonempty coordinate array");
  Point p(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) {
    if (!j[k].is_number()) throw MalformedInput("coordinates must be numbers");
    p[static_cast<Eigen::Index>(k)] = j[k].get<double>();
  }
  return p;
}

}  // namespace

Json body_to_json(const Body& body) {
  if (const auto* p = std::get_if<Polytope>(&body)) {
    Json verts = Json::array();
    for (std::size_t j = 0; j < p->size(); ++j) verts.push_back(point_json(p->vertex(j)));
    return {{"type", "polytope"}, {"dim", p->dim()}, {"vertices", verts}};
  }
  const auto& b = std::get<CapBody>(body);
  Json caps = Json::array();
  for (const Cap& c : b.caps()) {
    caps.push_back({{"axis", point_json(c.axis.coords())}, {"eta", c.eta}, {"truncated", c.truncated}});
  }
  return {{"type", "cap_body"}, {"dim", b.dim()}, {"gamma", b.gamma()}, {"caps", caps}};
}

Body body_from_json(const Json& j) {
  try {
    const std::string type = j.at("type").get<std::string>();
    if (type == "polytope") {
      std::vector<Point> pts;
      for (const auto& v : j.at("vertices")) pts.push_back(point_from_json(v));
      Polytope p(pts);
      if (j.contains("dim") && j.at("dim").get<int>() != p.dim()) {
        throw MalformedInput("polytope 'dim' disagrees with its vertices");
      }
      return p;
    }
    if (type == "cap_body") {
      std::vector<Cap> caps;
      for (const auto& c : j.at("caps")) {
        caps.push_back({Direction::normalized(point_from_json(c.at("axis"))), c.at("eta").get<double>(),
                        c.value("truncated", true)});
      }
      int dim = 0;
      if (j.contains("dim")) {
        dim = j.at("dim").get<int>();
      } else if (!caps.empty()) {
        dim = caps.front().axis.dim();
      } else {
        throw MalformedInput("cap body without caps needs 'dim'");
      }
      return CapBody(dim, j.at("gamma").get<double>(), std::move(caps));
    }
    throw MalformedInput("unknown body type '" + type + "'");
  } catch (const nlohmann::json::exception& e) {
    throw MalformedInput(std::string("body JSON: ") + e.what());
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MalformedInput("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw MalformedInput(path + ": " + e.what());
  }
}

Body read_body_file(const std::string& path) { return body_from_json(read_json_file(path)); }

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw MalformedInput("cannot write " + path);
  out << j.dump(2) << '\n';
}

std::vector<Polytope> family_from_json(const Json& j) {
  if (!j.is_array()) throw MalformedInput("family JSON must be an array of bodies");
  std::vector<Polytope> out;
  for (const auto& item : j) {
    Body b = body_from_json(item);
    if (!std::holds_alternative<Polytope>(b)) {
      throw MalformedInput("family members must be polytopes");
    }
    out.push_back(std::get<Polytope>(std::move(b)));
  }
  return out;
}

Json packing_to_json(const PackingSet& pack) {
  Json pts = Json::array();
  for (const Direction& u : pack.points) pts.push_back(point_json(u.coords()));
  return {{"dim", pack.dim}, {"epsilon", pack.epsilon}, {"points", pts}};
}

Json fit_result_to_json(const FitResult& fit) {
  Json verts = Json::array();
  for (std::size_t j = 0; j < fit.polytope.size(); ++j) verts.push_back(point_json(fit.polytope.vertex(j)));
  const auto& d = fit.diagnostics;
  return {{"vertices", verts},
          {"fitted_values", fit.fitted.values},
          {"objective", fit.objective},
          {"diagnostics",
           {{"estimator", d.estimator},
            {"iterations", d.iterations},
            {"kkt_residual", d.kkt_residual},
            {"certified", d.certified},
            {"best_restart", d.best_restart},
            {"objective_trace", d.objective_trace},
            {"warnings", d.warnings}}}};
}

void write_measurements_csv(std::ostream& os, const MeasurementSet& data) {
  data.validate();
  const int d = data.dim();
  for (int k = 1; k <= d; ++k) os << "u_" << k << ',';
  os << "y\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (int k = 0; k < d; ++k) os << format_double(data.directions[i][k]) << ',';
    os << format_double(data.values[i]) << '\n';
  }
}

MeasurementSet read_measurements_csv(std::istream& is, double sigma, double gamma) {
  std::string line;
  if (!std::getline(is, line)) throw MalformedInput("measurement CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::size_t columns = 1;
  for (char c : line) columns += c == ',';
  if (columns < 3) throw MalformedInput("measurement CSV needs columns u_1..u_d,y with d >= 2");
  const std::size_t d = columns - 1;

  MeasurementSet data;
  data.sigma = sigma;
  data.gamma = gamma;
  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> fields;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      while (used < cell.size() && (cell[used] == ' ' || cell[used] == '\t')) ++used;
      if (used == 0 || used != cell.size()) {
        throw MalformedInput("row " + std::to_string(row) + ": bad number '" + cell + "'");
      }
      fields.push_back(v);
    }
    if (fields.size() != columns) {
      throw MalformedInput("row " + std::to_string(row) + " has " + std::to_string(fields.size()) +
                           " fields, expected " + std::to_string(columns));
    }
    Point u(static_cast<Eigen::Index>(d));
    for (std::size_t k = 0; k < d; ++k) u[static_cast<Eigen::Index>(k)] = fields[k];
    if (std::abs(u.norm() - 1.0) > 1e-9) {
      throw MalformedInput("row " + std::to_string(row) + ": direction is not unit length");
    }
    const bool unit = std::abs(u.norm() - 1.0) <= 1e-12;
    data.directions.push_back(unit ? Direction(u) : Direction::normalized(u));
    data.values.push_back(fields[d]);
  }
  data.validate();
  return data;
}

}  // namespace supportfit
