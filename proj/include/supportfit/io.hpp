#pragma once

// File formats: JSON bodies, packings and fit results; CSV measurements.

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "supportfit/estimators.hpp"
#include "supportfit/geometry.hpp"
#include "supportfit/sphere.hpp"

namespace supportfit {

using Json = nlohmann::json;

/// {"type":"polytope","dim":d,"vertices":[[...],...]} or
/// {"type":"cap_body","gamma":g,"caps":[{"axis":[...],"eta":e,"truncated":b},...]}.
/// Cap bodies without caps additionally need "dim".
Json body_to_json(const Body& body);
Body body_from_json(const Json& j);

Body read_body_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);
Json read_json_file(const std::string& path);

/// A JSON array of polytope bodies.
std::vector<Polytope> family_from_json(const Json& j);

/// {"dim":d,"epsilon":e,"points":[[...],...]}
Json packing_to_json(const PackingSet& pack);

/// Vertices, fitted values, objective and solver diagnostics.
Json fit_result_to_json(const FitResult& fit);

/// Header u_1,...,u_d,y then one row per measurement; LF endings.
void write_measurements_csv(std::ostream& os, const MeasurementSet& data);
/// Unit rows are kept as written; rows within 1e-9 of unit length (decimal
/// round-off) are renormalized; anything further off is MalformedInput.
MeasurementSet read_measurements_csv(std::istream& is, double sigma, double gamma);

}  // namespace supportfit
