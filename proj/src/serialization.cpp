#include "gboson/serialization.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gboson/errors.hpp"

namespace gboson {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

double parse_double(std::string_view text, std::string_view what) {
  const std::string t = trim(text);
  // from_chars rejects an explicit plus sign
  const std::size_t skip = t.size() > 1 && t[0] == '+' && t[1] != '-' && t[1] != '+' ? 1 : 0;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data() + skip, t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(value)) {
    throw ValidationError("invalid number for " + std::string(what) + ": '" + t + "'");
  }
  return value;
}

long long parse_integer(std::string_view text, std::string_view what) {
  const std::string t = trim(text);
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw ValidationError("invalid integer for " + std::string(what) + ": '" + t + "'");
  }
  return value;
}

std::uint64_t parse_unsigned(std::string_view text, std::string_view what) {
  const std::string t = trim(text);
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw ValidationError("invalid unsigned integer for " + std::string(what) + ": '" + t + "'");
  }
  return value;
}

/// "2", "-0.5", "1+2i", "0.5-1i", "2i".
Complex parse_complex(std::string_view text) {
  const std::string t = trim(text);
  if (t.empty()) throw ValidationError("empty complex number");
  if (t.back() != 'i') return {parse_double(t, "q"), 0.0};
  const std::string body = t.substr(0, t.size() - 1);
  // split at the last sign that is not an exponent sign or leading sign
  for (std::size_t p = body.size(); p-- > 1;) {
    if ((body[p] == '+' || body[p] == '-') && body[p - 1] != 'e' && body[p - 1] != 'E') {
      const std::string imag = body.substr(p);
      return {parse_double(body.substr(0, p), "q"), parse_double(imag == "+" || imag == "-" ? imag + "1" : imag, "q")};
    }
  }
  return {0.0, parse_double(body.empty() || body == "+" || body == "-" ? body + "1" : body, "q")};
}

const Json& require(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ValidationError(std::string("missing JSON field '") + key + "'");
  return j.at(key);
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw ValidationError("complex value must be [re, im] or a number");
}

Json species_to_json(const GeneralizedBoson& boson) {
  Json j;
  auto table = [&] {
    Json arr = Json::array();
    for (const auto& z : boson.table()) arr.push_back(complex_to_json(z));
    return arr;
  };
  switch (boson.kind()) {
    case BosonKind::Standard:
      j["kind"] = "standard";
      break;
    case BosonKind::BosonPair:
      j["kind"] = "boson_pair";
      break;
    case BosonKind::SpinS:
      j["kind"] = "spin_s";
      j["params"] = {{"two_s", boson.two_s()}};
      break;
    case BosonKind::QBoson:
      j["kind"] = "q_boson";
      j["params"] = {{"q", complex_to_json(boson.q())}};
      break;
    case BosonKind::MParaboson:
      j["kind"] = "m_paraboson";
      j["params"] = {{"m", boson.m()}};
      break;
    case BosonKind::CustomF:
      j["kind"] = "custom_f";
      j["f_table"] = table();
      break;
    case BosonKind::CustomCommutator:
      j["kind"] = "custom_F";
      j["F_table"] = table();
      break;
  }
  return j;
}

GeneralizedBoson species_from_json(const Json& j) {
  const Json& kind_json = require(j, "kind");
  if (!kind_json.is_string()) throw ValidationError("species kind must be a string");
  const std::string kind = kind_json.get<std::string>();
  auto param = [&](const char* key) -> const Json& { return require(require(j, "params"), key); };
  auto table = [&](const char* key) {
    const Json& arr = require(j, key);
    if (!arr.is_array()) throw ValidationError(std::string(key) + " must be an array");
    std::vector<Complex> values;
    for (const auto& v : arr) values.push_back(complex_from_json(v));
    return values;
  };
  if (kind == "standard") return GeneralizedBoson::standard();
  if (kind == "boson_pair") return GeneralizedBoson::boson_pair();
  if (kind == "spin_s") {
    const Json& p = param("two_s");
    if (!p.is_number_integer()) throw ValidationError("two_s must be an integer");
    return GeneralizedBoson::spin_s(p.get<int>());
  }
  if (kind == "q_boson") return GeneralizedBoson::q_boson(complex_from_json(param("q")));
  if (kind == "m_paraboson") {
    const Json& p = param("m");
    if (!p.is_number_integer()) throw ValidationError("m must be an integer");
    return GeneralizedBoson::m_paraboson(p.get<int>());
  }
  if (kind == "custom_f") return GeneralizedBoson::custom_f(table("f_table"));
  if (kind == "custom_F") return GeneralizedBoson::custom_commutator(table("F_table"));
  throw ValidationError("unknown species kind '" + kind + "'");
}

Json matrix_to_json(const ComplexMatrix& m) {
  Json entries = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) entries.push_back(complex_to_json(m(r, c)));
  }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"entries", entries}};
}

ComplexMatrix matrix_from_json(const Json& j) {
  const Json& rows = require(j, "rows");
  const Json& cols = require(j, "cols");
  const Json& entries = require(j, "entries");
  if (!rows.is_number_integer() || !cols.is_number_integer() || rows.get<long long>() < 0 || cols.get<long long>() < 0) {
    throw ValidationError("matrix rows/cols must be non-negative integers");
  }
  const auto r = rows.get<Eigen::Index>();
  const auto c = cols.get<Eigen::Index>();
  if (!entries.is_array() || static_cast<Eigen::Index>(entries.size()) != r * c) {
    throw DimensionError("matrix entries must hold rows*cols values");
  }
  ComplexMatrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index k = 0; k < c; ++k) m(i, k) = complex_from_json(entries[static_cast<std::size_t>(i * c + k)]);
  }
  return m;
}

Json vector_to_json(const ComplexVector& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(complex_to_json(v(i)));
  return arr;
}

ComplexVector vector_from_json(const Json& j) {
  if (!j.is_array()) throw ValidationError("vector must be an array");
  ComplexVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i]);
  return v;
}

Json occupation_to_json(const OccupationVector& k) { return Json(k.counts); }

Json distribution_to_json(const Distribution& dist) {
  Json outcomes = Json::array();
  Json probs = Json::array();
  for (const auto& [k, p] : dist.entries) {
    outcomes.push_back(occupation_to_json(k));
    probs.push_back(p);
  }
  return Json{{"outcomes", outcomes}, {"probs", probs}, {"total_mass", dist.total_mass}, {"normalized", dist.normalized}};
}

Distribution distribution_from_json(const Json& j) {
  const Json& outcomes = require(j, "outcomes");
  const Json& probs = require(j, "probs");
  if (!outcomes.is_array() || !probs.is_array() || outcomes.size() != probs.size()) {
    throw DimensionError("outcomes and probs must be arrays of equal length");
  }
  Distribution dist;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    dist.entries[OccupationVector(outcomes[i].get<std::vector<int>>())] = probs[i].get<double>();
  }
  dist.total_mass = require(j, "total_mass").get<double>();
  dist.normalized = require(j, "normalized").get<bool>();
  return dist;
}

Json gaussian_state_to_json(const GaussianState& state) {
  Json j{{"sigma_q", matrix_to_json(state.sigma_q)}};
  if (state.displacement) j["displacement"] = vector_to_json(*state.displacement);
  return j;
}

GaussianState gaussian_state_from_json(const Json& j) {
  std::optional<ComplexVector> d;
  if (j.contains("displacement") && !j.at("displacement").is_null()) d = vector_from_json(j.at("displacement"));
  return make_gaussian_state(matrix_from_json(require(j, "sigma_q")), d);
}

Json scaling_to_json(const ScalingTable& table) {
  Json j{{"M", table.modes}, {"mean_tv", table.mean_tv}, {"stderr", table.stderr_tv}};
  j["fitted_exponent"] = std::isfinite(table.fitted_exponent) ? Json(table.fitted_exponent) : Json(nullptr);
  return j;
}

std::string scaling_to_csv(const ScalingTable& table) {
  std::ostringstream os;
  os << "M,mean_tv,stderr\n";
  for (std::size_t i = 0; i < table.modes.size(); ++i) {
    os << table.modes[i] << ',' << format_double(table.mean_tv[i]) << ',' << format_double(table.stderr_tv[i]) << '\n';
  }
  return os.str();
}

Json sparse_to_json(const SparseOperator& op) {
  Json rows = Json::array();
  Json cols = Json::array();
  Json values = Json::array();
  const auto trips = op.triplets();
  for (const auto& t : trips) {
    rows.push_back(t.row);
    cols.push_back(t.col);
    values.push_back(complex_to_json(t.value));
  }
  return Json{{"rows", op.dimension()}, {"cols", op.dimension()}, {"nnz", trips.size()},
              {"row", rows},           {"col", cols},             {"values", values}};
}

Json roundtrip_to_json(const RoundtripReport& report) {
  Json rows = Json::array();
  for (const auto& r : report.rows) {
    Json row{{"n", r.n},
             {"f", complex_to_json(r.f)},
             {"F", complex_to_json(r.F)},
             {"f_reconstructed", complex_to_json(r.f_reconstructed)},
             {"roundtrip_residual", r.roundtrip_residual}};
    row["table_F"] = r.table_F ? complex_to_json(*r.table_F) : Json(nullptr);
    row["table_f"] = r.table_f ? complex_to_json(*r.table_f) : Json(nullptr);
    row["table_residual"] = r.table_residual ? Json(*r.table_residual) : Json(nullptr);
    rows.push_back(row);
  }
  return Json{{"species", report.species},
              {"n_max", report.n_max},
              {"rows", rows},
              {"max_roundtrip_residual", report.max_roundtrip_residual},
              {"max_table_residual", report.max_table_residual},
              {"roundtrip_ok", report.roundtrip_ok},
              {"table_consistent", report.table_consistent}};
}

GeneralizedBoson parse_boson_spec(std::string_view spec) {
  const std::string s = trim(spec);
  const auto colon = s.find(':');
  const std::string head = s.substr(0, colon);
  const std::string arg = colon == std::string::npos ? std::string() : s.substr(colon + 1);
  const bool has_arg = colon != std::string::npos;
  auto need_arg = [&] {
    if (!has_arg || arg.empty()) throw ValidationError("boson spec '" + s + "' needs a parameter");
  };
  auto no_arg = [&] {
    if (has_arg) throw ValidationError("boson spec '" + head + "' takes no parameter");
  };
  if (head == "standard") {
    no_arg();
    return GeneralizedBoson::standard();
  }
  if (head == "boson_pair") {
    no_arg();
    return GeneralizedBoson::boson_pair();
  }
  if (head == "spin_s") {
    need_arg();
    double spin = 0.0;
    if (const auto slash = arg.find('/'); slash != std::string::npos) {
      spin = parse_double(arg.substr(0, slash), "spin") / parse_double(arg.substr(slash + 1), "spin");
    } else {
      spin = parse_double(arg, "spin");
    }
    const double two_s = 2.0 * spin;
    if (!(two_s >= 1.0) || std::abs(two_s - std::round(two_s)) > 1e-12 || two_s > 1e6) {
      throw ValidationError("spin must be a positive multiple of 1/2");
    }
    return GeneralizedBoson::spin_s(static_cast<int>(std::lround(two_s)));
  }
  if (head == "q_boson") {
    need_arg();
    return GeneralizedBoson::q_boson(parse_complex(arg));
  }
  if (head == "m_paraboson") {
    need_arg();
    return GeneralizedBoson::m_paraboson(static_cast<int>(parse_integer(arg, "m")));
  }
  if (head == "file") {
    need_arg();
    return species_from_json(read_json_file(arg));
  }
  throw ValidationError("unknown boson spec '" + s + "'");
}

ModeUnitary parse_unitary_spec(std::string_view spec) {
  const std::string s = trim(spec);
  if (s.rfind("file:", 0) == 0) return ModeUnitary(matrix_from_json(read_json_file(s.substr(5))));
  if (s.rfind("haar:", 0) == 0) {
    std::optional<long long> modes;
    std::optional<std::uint64_t> seed;
    for (const auto& part : split(s.substr(5), ',')) {
      const auto eq = part.find('=');
      if (eq == std::string::npos) throw ValidationError("haar spec entries must be key=value");
      const std::string key = trim(part.substr(0, eq));
      const std::string value = part.substr(eq + 1);
      if (key == "M") {
        modes = parse_integer(value, "M");
      } else if (key == "seed") {
        seed = parse_unsigned(value, "seed");
      } else {
        throw ValidationError("unknown haar spec key '" + key + "'");
      }
    }
    if (!modes || !seed) throw ValidationError("haar spec needs M and seed");
    if (*modes < 1 || *modes > 64) throw ValidationError("haar M must lie in [1, 64]");
    return haar_unitary(static_cast<int>(*modes), *seed);
  }
  throw ValidationError("unitary spec must be haar:M=..,seed=.. or file:PATH");
}

OccupationVector parse_occupation(std::string_view text) {
  std::vector<int> counts;
  for (const auto& part : split(text, ',')) {
    const long long v = parse_integer(part, "occupation");
    if (v < 0 || v > 1000) throw ValidationError("occupations must lie in [0, 1000]");
    counts.push_back(static_cast<int>(v));
  }
  return OccupationVector(counts);
}

std::vector<int> parse_int_list(std::string_view text) {
  std::vector<int> values;
  for (const auto& part : split(text, ',')) {
    const long long v = parse_integer(part, "list entry");
    if (v < -1000000 || v > 1000000) throw ValidationError("list entry out of range");
    values.push_back(static_cast<int>(v));
  }
  return values;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ValidationError("malformed JSON in " + path + ": " + e.what());
  }
}

}  // namespace gboson
