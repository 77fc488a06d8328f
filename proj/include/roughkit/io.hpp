#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "roughkit/algebra.hpp"
#include "roughkit/controlled.hpp"
#include "roughkit/rde.hpp"
#include "roughkit/rough_path.hpp"
#include "roughkit/rpde.hpp"
#include "roughkit/smooth_function.hpp"

namespace roughkit {

using Json = nlohmann::ordered_json;

// Shortest decimal that reads back to the same double.
std::string format_double(double v);

// Parses text, InputError with the byte offset on malformed input.
Json parse_json(const std::string& text, const std::string& what);
Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
// Two-space indented dump with a trailing newline.
std::string dump_json(const Json& j);

// {"d", "level", "terms": [{"word": [...], "value": x}, ...]} in canonical order.
Json tensor_to_json(const TruncatedTensor& t);
TruncatedTensor tensor_from_json(const Json& j);

// {"gamma", "level", "times", "basepoints": [tensor, ...]}
Json rough_path_to_json(const GeometricRoughPath& w);
GeometricRoughPath rough_path_from_json(const Json& j);

// {"order", "width", "times", "coeffs": [{"word": [...], "values": [[...] per time]}]}
Json controlled_to_json(const ControlledPath& x);

// {"family": "polynomial", "n_in", "components": [[{"coeff", "powers"}]]},
// {"family": "affine", "matrix", "offset"}, {"family": "trig", "n_in", "components": [[{"coeff", "freq", "phase"}]]},
// {"family": "gaussian", "n_in", "components": [[{"coeff", "center", "width"}]]}
Json function_to_json(const SmoothFunction& f);
SmoothFunction function_from_json(const Json& j);
// {"fields": [function, ...]}
Json fields_to_json(const VectorFieldSystem& v);
VectorFieldSystem fields_from_json(const Json& j);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
CsvTable read_csv(const std::string& path);
std::string csv_text(const CsvTable& t);

// t,x1,...,xd
PiecewiseLinearPath path_from_csv(const CsvTable& t);
// w,x1,...,xn
ParticleMeasure particles_from_csv(const CsvTable& t);
// s,x1,...,xn
std::vector<TransportQuery> queries_from_csv(const CsvTable& t);

// FNV-1a, 64 bit
std::uint64_t fnv1a(const std::string& bytes);
std::string hex64(std::uint64_t v);

Json order_fit_to_json(const OrderFit& f);
Json graded_to_json(const std::string& name, const GradedReport& r);

}  // namespace roughkit
