#pragma once

// JSON encoding of matrices, measures, solver settings and results.
//
//   matrix:  {"n": 2, "data": [a00, a01, a10, a11]}        (row-major)
//   measure: {"atoms": [<matrix>...], "weights": [...]}     (weights optional)
//   config:  {"tol", "max_iter", "power_t_start", "power_t_shrink", "damping"}
//   flow:    {"state": <matrix>, "n_used": int, "error_bound": real}
//   law:     {"kind": "finite", "measure": <measure>}
//            {"kind": "log_gaussian", "base": <matrix>, "scale": real}
//
// Doubles are written in the shortest form that reads back to the same value.

#include <string>

#include <json.hpp>

#include "karcher/lln.hpp"

namespace karcher {

using Json = nlohmann::json;

Json to_json(const SymMatrix& m);
Json to_json(const SpdMatrix& m);
Json to_json(const DiscreteMeasure& mu);
Json to_json(const SolveReport& r);
Json to_json(const SolverConfig& cfg);
Json to_json(const FlowResult& r);
Json to_json(const W1Result& r);
Json to_json(const SpdLaw& law);

/// Schema violations throw InputError naming the offending field.
SymMatrix sym_from_json(const Json& j);
SpdMatrix spd_from_json(const Json& j);
DiscreteMeasure measure_from_json(const Json& j);
SpdLaw law_from_json(const Json& j);
/// Fields absent from `j` keep their value from `base`.
SolverConfig config_from_json(const Json& j, SolverConfig base = {});

/// Parses `text`; syntax errors throw InputError "<source>:<line>:<column>: ...".
Json parse_json(const std::string& text, const std::string& source = "<input>");
Json read_json_file(const std::string& path);

/// 1-based line and column of a 1-based byte offset into `text`.
std::pair<int, int> line_column(const std::string& text, std::size_t byte);

}  // namespace karcher
