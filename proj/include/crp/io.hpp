#pragma once

// CSV and JSON (de)serialisation for paths, rough paths, solutions, models,
// vector fields and path functions.
//
// Path CSV: header `t,v1..vd,jump`. Consecutive rows with distinct times are
// joined linearly; a jump is written as two rows with the same t, the left
// limit first and then the new value with jump=1.

#include "crp/cadlag.hpp"
#include "crp/lift.hpp"
#include "crp/path_function.hpp"
#include "crp/rde.hpp"
#include "crp/stochastic.hpp"
#include "crp/vector_fields.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>

namespace crp {

using json = nlohmann::json;

void write_path_csv(std::ostream& os, const Path& x);
Path read_path_csv(std::istream& is);
Path read_path_csv_file(const std::string& file);
void write_path_csv_file(const std::string& file, const Path& x);

/// Rows `t,v1..vd,m11..mdd,jump` of the running signature.
void write_rough_csv(std::ostream& os, const RoughPath2& x);
RoughPath2 read_rough_csv(std::istream& is);
json rough_metadata(const RoughPath2& x);

void write_solution_csv(std::ostream& os, const RdeSolution& sol);

SemimartingaleModel model_from_json(const json& j);
json model_to_json(const SemimartingaleModel& m);

/// {"builtin": "linear"|"rotation"|"quadratic"|"zero", ...}; see README for keys.
VectorFields fields_from_json(const json& j);
/// "builtin:<name>" with default parameters, or a path to a JSON file.
VectorFields fields_from_arg(const std::string& arg, int driver_dim);

PathFunction phi_from_name(const std::string& name);

Vec vec_from_json(const json& j);
Mat mat_from_json(const json& j);
json to_json(const Vec& v);
json to_json(const Mat& m);
Vec parse_vec(const std::string& csv);

/// FNV-1a 64 of the canonical dump, as 16 hex digits.
std::string config_hash(const json& j);

}  // namespace crp
