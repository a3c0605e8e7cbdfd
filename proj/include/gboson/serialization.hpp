#pragma once

// JSON encodings shared by the library and the command-line tool.
//
//   species       {"kind": "spin_s", "params": {"two_s": 2}}, {"kind": "custom_f", "f_table": [[re, im], ...]}
//   matrix        {"rows": r, "cols": c, "entries": [[re, im], ...]} row-major
//   vector        [[re, im], ...]
//   distribution  {"outcomes": [[k1..kM], ...], "probs": [...], "total_mass": x, "normalized": bool}
//   gaussian      {"sigma_q": matrix, "displacement": vector (optional)}
//   scaling       {"M": [...], "mean_tv": [...], "stderr": [...], "fitted_exponent": x | null}
//   sparse        {"rows": n, "cols": n, "nnz": k, "row": [...], "col": [...], "values": [[re, im], ...]}

#include <json.hpp>
#include <string>
#include <string_view>
#include <vector>

#include "gboson/algebra.hpp"
#include "gboson/dynamics.hpp"
#include "gboson/exactlinalg.hpp"
#include "gboson/fbs.hpp"
#include "gboson/gbs.hpp"

namespace gboson {

using Json = nlohmann::ordered_json;

Json complex_to_json(Complex z);
/// Accepts [re, im] or a bare real number.
Complex complex_from_json(const Json& j);

Json species_to_json(const GeneralizedBoson& boson);
GeneralizedBoson species_from_json(const Json& j);

Json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const Json& j);

Json vector_to_json(const ComplexVector& v);
ComplexVector vector_from_json(const Json& j);

Json occupation_to_json(const OccupationVector& k);

Json distribution_to_json(const Distribution& dist);
Distribution distribution_from_json(const Json& j);

Json gaussian_state_to_json(const GaussianState& state);
GaussianState gaussian_state_from_json(const Json& j);

Json scaling_to_json(const ScalingTable& table);
/// Header "M,mean_tv,stderr" followed by one row per mode count.
std::string scaling_to_csv(const ScalingTable& table);

Json sparse_to_json(const SparseOperator& op);

Json roundtrip_to_json(const RoundtripReport& report);

/// Parses "standard", "boson_pair", "spin_s:S" (S as 1, 0.5 or 1/2), "q_boson:q" (q real or re+imi),
/// "m_paraboson:m" or "file:PATH" (species JSON).
GeneralizedBoson parse_boson_spec(std::string_view spec);

/// Parses "haar:M=3,seed=5" or "file:PATH" (matrix JSON).
ModeUnitary parse_unitary_spec(std::string_view spec);

/// Parses "1,0,2".
OccupationVector parse_occupation(std::string_view text);

/// Parses "4,6,8".
std::vector<int> parse_int_list(std::string_view text);

/// Reads and parses a JSON file; throws ValidationError on I/O or syntax problems.
Json read_json_file(const std::string& path);

}  // namespace gboson
