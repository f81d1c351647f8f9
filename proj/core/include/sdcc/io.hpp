#pragma once

#include "sdcc/rank_app.hpp"

#include <nlohmann/json.hpp>

namespace sdcc {

using Json = nlohmann::json;

/// Matrix wire format: {"n": int, "rows": [[...], ...]}, row-major doubles.
/// Loading validates the symmetry invariant and rejects violations.
Json matrix_to_json(const Mat& m);
Mat matrix_from_json(const Json& j);
Mat load_matrix(const std::string& path);
void save_matrix(const std::string& path, const Mat& m);

Json vector_to_json(const Vec& v);
Vec vector_from_json(const Json& j);

Json report_to_json(const MembershipReport& r);
Json sigma_to_json(const SigmaValue& s);
Json stationarity_to_json(const StationarityReport& r);
Json condition_to_json(const ConditionReport& r);
Json sonc_to_json(const SoncAggregate& a);
Json sosc_to_json(const SoscAggregate& a);
Json example_to_json(const ExampleReport& r);

Json problem_to_json(const ProblemSpec& spec);
ProblemSpec problem_from_json(const Json& j);
ProblemSpec load_problem(const std::string& path);

Vec point_from_json(const Json& j);  // {"x": [...]}
MultiplierPair multipliers_from_json(const Json& j, const ProblemSpec& spec);

Json load_json(const std::string& path);

/// Canonical dump: sorted keys, shortest round-trip doubles, newline
/// terminated.  Identical inputs produce byte-identical output.
std::string dump_deterministic(const Json& j);

}  // namespace sdcc
