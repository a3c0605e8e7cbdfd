#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "gboson/errors.hpp"
#include "gboson/serialization.hpp"
#include "oracles.hpp"

using namespace gboson;

TEST_CASE("species round trip") {
  const std::vector<GeneralizedBoson> species = {
      GeneralizedBoson::standard(),     GeneralizedBoson::boson_pair(),
      GeneralizedBoson::spin_s(3),      GeneralizedBoson::q_boson(Complex(0.4, 0.9)),
      GeneralizedBoson::m_paraboson(2), GeneralizedBoson::custom_f({{1.0, 0.0}, {1.5, 0.0}, {0.0, 0.0}}),
      GeneralizedBoson::custom_commutator({{2.0, 0.0}, {10.0, 0.0}})};
  for (const auto& b : species) {
    const Json j = species_to_json(b);
    const GeneralizedBoson back = species_from_json(j);
    CHECK(back.kind() == b.kind());
    CHECK(species_to_json(back) == j);
    for (int n = 0; n <= 2; ++n) CHECK(f_eval(back, n) == f_eval(b, n));
  }
  CHECK(species_to_json(GeneralizedBoson::spin_s(2)).dump() == R"({"kind":"spin_s","params":{"two_s":2}})");
  CHECK_THROWS_AS(species_from_json(Json::parse(R"({"kind":"fermion"})")), ValidationError);
  CHECK_THROWS_AS(species_from_json(Json::parse(R"({"kind":"spin_s"})")), ValidationError);
}

TEST_CASE("matrix and vector round trip") {
  const ComplexMatrix m = oracle::random_complex(2, 3, 4);
  const Json j = matrix_to_json(m);
  CHECK(j["rows"] == 2);
  CHECK(j["cols"] == 3);
  CHECK(j["entries"].size() == 6);
  CHECK(j["entries"][1][0].get<double>() == m(0, 1).real());
  CHECK(matrix_from_json(j) == m);
  CHECK_THROWS_AS(matrix_from_json(Json::parse(R"({"rows":2,"cols":2,"entries":[[1,0]]})")), DimensionError);

  const ComplexVector v = oracle::random_complex(3, 1, 5);
  CHECK(vector_from_json(vector_to_json(v)) == v);
}

TEST_CASE("distribution JSON") {
  Distribution d;
  d.entries[{0, 2}] = 0.25;
  d.entries[{1, 1}] = 0.75;
  d.total_mass = 1.0;
  d.normalized = true;
  const Json j = distribution_to_json(d);
  CHECK(j.dump() == R"({"outcomes":[[0,2],[1,1]],"probs":[0.25,0.75],"total_mass":1.0,"normalized":true})");
  const Distribution back = distribution_from_json(j);
  CHECK(back.entries == d.entries);
  CHECK(back.normalized);
}

TEST_CASE("Gaussian state JSON") {
  const ComplexMatrix sigma = oracle::random_sigma(2, 3);
  ComplexVector d(2);
  d << Complex(0.1, 0.2), Complex(-0.3, 0.0);
  const GaussianState st = make_gaussian_state(sigma, d);
  const GaussianState back = gaussian_state_from_json(gaussian_state_to_json(st));
  CHECK((back.sigma_q - st.sigma_q).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(back.displacement.has_value());
  CHECK(*back.displacement == d);
  CHECK(back.norm_g == st.norm_g);
  CHECK_FALSE(gaussian_state_to_json(make_gaussian_state(sigma)).contains("displacement"));
}

TEST_CASE("scaling table formats") {
  ScalingTable t;
  t.modes = {4, 6};
  t.mean_tv = {0.5, 0.25};
  t.stderr_tv = {0.01, 0.02};
  t.fitted_exponent = std::nan("");
  const Json j = scaling_to_json(t);
  CHECK(j["fitted_exponent"].is_null());
  CHECK(j["M"] == Json::array({4, 6}));
  CHECK(scaling_to_csv(t) == "M,mean_tv,stderr\n4,0.5,0.01\n6,0.25,0.02\n");
}

TEST_CASE("sparse export is sorted coordinate list") {
  const FockSpace space = build_space(2, {2, 2});
  ComplexMatrix j(2, 2);
  j << 0.5, 1.0, 1.0, 0.0;
  const Json s = sparse_to_json(build_quadratic(GeneralizedBoson::standard(), j, space));
  CHECK(s["rows"] == 4);
  CHECK(s["nnz"] == s["values"].size());
  const auto rows = s["row"].get<std::vector<long long>>();
  const auto cols = s["col"].get<std::vector<long long>>();
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK((rows[i - 1] < rows[i] || (rows[i - 1] == rows[i] && cols[i - 1] < cols[i])));
  }
}

TEST_CASE("boson spec strings") {
  CHECK(parse_boson_spec("standard").kind() == BosonKind::Standard);
  CHECK(parse_boson_spec("boson_pair").kind() == BosonKind::BosonPair);
  CHECK(parse_boson_spec("spin_s:1").two_s() == 2);
  CHECK(parse_boson_spec("spin_s:0.5").two_s() == 1);
  CHECK(parse_boson_spec("spin_s:3/2").two_s() == 3);
  CHECK(parse_boson_spec("q_boson:2").q() == Complex(2.0, 0.0));
  CHECK(parse_boson_spec("q_boson:0.5+1i").q() == Complex(0.5, 1.0));
  CHECK(parse_boson_spec("q_boson:-1i").q() == Complex(0.0, -1.0));
  CHECK(parse_boson_spec("m_paraboson:3").m() == 3);
  for (const char* bad : {"spin_s:0.3", "spin_s", "standard:1", "photon", "q_boson:abc", "m_paraboson:1.5"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_boson_spec(bad), ValidationError);
  }

  const std::string path = "species_spec_test.json";
  {
    std::ofstream out(path);
    out << R"({"kind": "custom_F", "F_table": [[2, 0], [10, 0], [18, 0]]})";
  }
  const GeneralizedBoson fromfile = parse_boson_spec("file:" + path);
  CHECK(fromfile.kind() == BosonKind::CustomCommutator);
  CHECK(std::abs(std::norm(f_eval(fromfile, 2)) - 24.0) < 1e-12);
  std::remove(path.c_str());
}

TEST_CASE("unitary spec strings") {
  const ModeUnitary u = parse_unitary_spec("haar:M=3,seed=5");
  CHECK(u.dim() == 3);
  CHECK(u.matrix() == haar_unitary(3, 5).matrix());
  CHECK(parse_unitary_spec("haar:seed=5,M=3").matrix() == u.matrix());
  for (const char* bad : {"haar:M=3", "haar:M=0,seed=1", "haar:M=2,seed=-1", "haar:M=2,seed=1,x=2", "qr:3", "file:/nonexistent"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_unitary_spec(bad), ValidationError);
  }
}

TEST_CASE("occupation and list strings") {
  CHECK(parse_occupation("1,0,2") == OccupationVector{1, 0, 2});
  CHECK(parse_occupation(" 1 , 1 ") == OccupationVector{1, 1});
  CHECK(parse_int_list("4,6,8") == std::vector<int>{4, 6, 8});
  CHECK_THROWS_AS(parse_occupation("1,-1"), ValidationError);
  CHECK_THROWS_AS(parse_occupation("1,,2"), ValidationError);
  CHECK_THROWS_AS(parse_occupation("a"), ValidationError);
}
