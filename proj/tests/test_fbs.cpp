#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "gboson/errors.hpp"
#include "gboson/fbs.hpp"
#include "oracles.hpp"

using namespace gboson;

namespace {

ModeUnitary beamsplitter() {
  ComplexMatrix bs(2, 2);
  bs << 1.0, 1.0, 1.0, -1.0;
  return ModeUnitary(bs / std::sqrt(2.0));
}

std::vector<GeneralizedBoson> catalog() {
  return {GeneralizedBoson::standard(),   GeneralizedBoson::boson_pair(),   GeneralizedBoson::spin_s(1),
          GeneralizedBoson::spin_s(2),    GeneralizedBoson::q_boson(2.0),   GeneralizedBoson::m_paraboson(0),
          GeneralizedBoson::m_paraboson(1)};
}

}  // namespace

TEST_CASE("outcome_probability examples") {
  const ModeUnitary id(ComplexMatrix::Identity(3, 3));
  for (const auto& b : catalog()) {
    const OccupationVector l{1, 0, 1};
    CHECK(std::abs(outcome_probability(b, id, l, l) - 1.0) < 1e-14);
  }
  const OccupationVector l2{2, 1, 0};
  CHECK(std::abs(outcome_probability(GeneralizedBoson::boson_pair(), id, l2, l2) - 1.0) < 1e-12);

  const ModeUnitary bs = beamsplitter();
  CHECK(outcome_probability(GeneralizedBoson::standard(), bs, {1, 1}, {1, 1}) < 1e-30);
  CHECK(outcome_probability(GeneralizedBoson::spin_s(1), bs, {1, 1}, {2, 0}) == 0.0);
  CHECK(std::abs(outcome_probability(GeneralizedBoson::standard(), bs, {1, 1}, {2, 0}) - 0.5) < 1e-14);
  CHECK(std::abs(std::norm(amplitude_oracle(GeneralizedBoson::standard(), bs, {1, 1}, {2, 0})) - 0.5) < 1e-14);
}

TEST_CASE("outcome_probability errors") {
  const ModeUnitary bs = beamsplitter();
  CHECK_THROWS_AS(outcome_probability(GeneralizedBoson::standard(), bs, {1, 1}, {1, 0}), ValidationError);
  CHECK_THROWS_AS(outcome_probability(GeneralizedBoson::standard(), bs, {1, 1, 0}, {1, 1, 0}), DimensionError);
  CHECK_THROWS_AS(outcome_probability(GeneralizedBoson::spin_s(1), bs, {2, 0}, {1, 1}), ValidationError);
}

TEST_CASE("amplitude_oracle examples") {
  const ModeUnitary id(ComplexMatrix::Identity(3, 3));
  CHECK(std::abs(amplitude_oracle(GeneralizedBoson::boson_pair(), id, {2, 0, 1}, {2, 0, 1}) - 1.0) < 1e-12);
  const ModeUnitary u = haar_unitary(2, 3);
  CHECK(std::abs(amplitude_oracle(GeneralizedBoson::standard(), u, {1, 0}, {0, 1}) - u(1, 0)) < 1e-15);
  CHECK_THROWS_AS(amplitude_oracle(GeneralizedBoson::standard(), haar_unitary(7, 1), {1, 0, 0, 0, 0, 0, 0},
                                   {1, 0, 0, 0, 0, 0, 0}),
                  GuardError);
}

TEST_CASE("permanent formula matches the polynomial expansion") {
  double worst = 0.0;
  for (int m = 1; m <= 4; ++m) {
    for (int seed = 0; seed < 5; ++seed) {
      const ModeUnitary u = haar_unitary(m, 500 + static_cast<std::uint64_t>(seed));
      for (int n = 0; n <= 3; ++n) {
        const auto outcomes = enumerate_outcomes(m, n);
        for (const auto& b : catalog()) {
          for (const auto& l : outcomes) {
            if (b.local_dim() && *std::max_element(l.counts.begin(), l.counts.end()) >= *b.local_dim()) continue;
            for (const auto& k : outcomes) {
              worst = std::max(worst, std::abs(std::norm(amplitude_oracle(b, u, l, k)) - outcome_probability(b, u, l, k)));
            }
          }
        }
      }
    }
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("collision-free probabilities do not depend on the species") {
  const std::vector<GeneralizedBoson> species = {GeneralizedBoson::standard(), GeneralizedBoson::spin_s(1),
                                                 GeneralizedBoson::boson_pair(), GeneralizedBoson::q_boson(2.0)};
  for (int seed = 0; seed < 10; ++seed) {
    const ModeUnitary u = haar_unitary(4, 40 + static_cast<std::uint64_t>(seed));
    for (const auto& l : enumerate_outcomes(4, 2, 2)) {
      for (const auto& k : enumerate_outcomes(4, 2, 2)) {
        const double ref = outcome_probability(species[0], u, l, k);
        for (const auto& b : species) CHECK(std::abs(outcome_probability(b, u, l, k) - ref) < 1e-10);
      }
    }
  }
}

TEST_CASE("relabeling modes permutes probabilities") {
  const ModeUnitary u = haar_unitary(3, 21);
  const std::vector<int> perm = {2, 0, 1};
  ComplexMatrix p = ComplexMatrix::Zero(3, 3);
  for (int i = 0; i < 3; ++i) p(perm[static_cast<std::size_t>(i)], i) = 1.0;
  const ModeUnitary up(p * u.matrix() * p.transpose());
  auto permute = [&](const OccupationVector& v) {
    std::vector<int> out(3);
    for (int i = 0; i < 3; ++i) out[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = v[static_cast<std::size_t>(i)];
    return OccupationVector(out);
  };
  for (const auto& b : catalog()) {
    for (const auto& l : enumerate_outcomes(3, 2)) {
      if (b.local_dim() && *std::max_element(l.counts.begin(), l.counts.end()) >= *b.local_dim()) continue;
      for (const auto& k : enumerate_outcomes(3, 2)) {
        CHECK(std::abs(outcome_probability(b, u, l, k) - outcome_probability(b, up, permute(l), permute(k))) < 1e-10);
      }
    }
  }
}

TEST_CASE("enumerate_outcomes") {
  const auto two = enumerate_outcomes(2, 2);
  REQUIRE(two.size() == 3);
  CHECK(two[0] == OccupationVector{0, 2});
  CHECK(two[1] == OccupationVector{1, 1});
  CHECK(two[2] == OccupationVector{2, 0});
  const auto capped = enumerate_outcomes(2, 2, 2);
  REQUIRE(capped.size() == 1);
  CHECK(capped[0] == OccupationVector{1, 1});
  CHECK(enumerate_outcomes(4, 3).size() == 20);
}

TEST_CASE("full_distribution") {
  for (int m = 1; m <= 4; ++m) {
    for (int n = 0; n <= 3; ++n) {
      const ModeUnitary u = haar_unitary(m, 900 + static_cast<std::uint64_t>(10 * m + n));
      for (const auto& l : enumerate_outcomes(m, n)) {
        const auto d = full_distribution(GeneralizedBoson::standard(), u, l, NormalizationPolicy::Raw);
        CHECK(std::abs(d.total_mass - 1.0) < 1e-9);
        CHECK(d.normalized);
      }
    }
  }

  const ModeUnitary bs = beamsplitter();
  const auto spin = full_distribution(GeneralizedBoson::spin_s(1), bs, {1, 1}, NormalizationPolicy::Raw);
  CHECK(spin.entries.size() == 3);
  CHECK(spin.total_mass < 1e-30);
  CHECK_FALSE(spin.normalized);
  CHECK_THROWS_AS(full_distribution(GeneralizedBoson::spin_s(1), bs, {1, 1}, NormalizationPolicy::Renormalize),
                  DomainError);

  const ModeUnitary id(ComplexMatrix::Identity(3, 3));
  const auto point = full_distribution(GeneralizedBoson::boson_pair(), id, {1, 0, 2}, NormalizationPolicy::Raw);
  CHECK(std::abs(point.probability({1, 0, 2}) - 1.0) < 1e-12);
  CHECK(std::abs(point.total_mass - 1.0) < 1e-12);
}

TEST_CASE("renormalized distribution sums to one") {
  const ModeUnitary u = haar_unitary(3, 17);
  const auto raw = full_distribution(GeneralizedBoson::boson_pair(), u, {2, 1, 0}, NormalizationPolicy::Raw);
  const auto ren = full_distribution(GeneralizedBoson::boson_pair(), u, {2, 1, 0}, NormalizationPolicy::Renormalize);
  CHECK(ren.normalized);
  CHECK(ren.total_mass == raw.total_mass);
  double sum = 0.0;
  for (const auto& [k, p] : ren.entries) {
    sum += p;
    CHECK(std::abs(p - raw.probability(k) / raw.total_mass) < 1e-14);
  }
  CHECK(std::abs(sum - 1.0) < 1e-12);
}

TEST_CASE("distribution does not depend on the thread count") {
  const ModeUnitary u = haar_unitary(4, 3);
  const auto one = full_distribution(GeneralizedBoson::q_boson(2.0), u, {1, 1, 1, 0}, NormalizationPolicy::Raw, 1);
  const auto four = full_distribution(GeneralizedBoson::q_boson(2.0), u, {1, 1, 1, 0}, NormalizationPolicy::Raw, 4);
  CHECK(one.total_mass == four.total_mass);
  CHECK(one.entries == four.entries);
}

TEST_CASE("sampling") {
  Distribution point;
  point.entries[{1, 0}] = 1.0;
  point.total_mass = 1.0;
  point.normalized = true;
  for (const auto& k : sample(point, 100, 3)) CHECK(k == OccupationVector{1, 0});

  Distribution coin;
  coin.entries[{0, 1}] = 0.5;
  coin.entries[{1, 0}] = 0.5;
  coin.total_mass = 1.0;
  coin.normalized = true;
  const auto draws = sample(coin, 100000, 12345);
  const double heads = static_cast<double>(std::count(draws.begin(), draws.end(), OccupationVector{1, 0})) / 1e5;
  CHECK(std::abs(heads - 0.5) < 0.01);
  CHECK(sample(coin, 50, 9) == sample(coin, 50, 9));

  Distribution raw = coin;
  raw.normalized = false;
  CHECK_THROWS_AS(sample(raw, 1, 0), ValidationError);
}

TEST_CASE("sampling goodness of fit") {
  const ModeUnitary u = haar_unitary(3, 2024);
  const auto dist = full_distribution(GeneralizedBoson::standard(), u, {1, 1, 0}, NormalizationPolicy::Raw);
  REQUIRE(dist.entries.size() == 6);
  const std::size_t count = 100000;
  std::map<OccupationVector, double> freq;
  for (const auto& k : sample(dist, count, 77)) freq[k] += 1.0;
  double chi2 = 0.0;
  for (const auto& [k, p] : dist.entries) {
    const double expected = p * count;
    const double diff = freq[k] - expected;
    chi2 += diff * diff / expected;
  }
  CHECK(chi2 < oracle::kChiSquare999Df5);
}

TEST_CASE("total_variation") {
  Distribution p;
  p.entries[{0, 1}] = 0.5;
  p.entries[{1, 0}] = 0.5;
  p.total_mass = 1.0;
  p.normalized = true;
  CHECK(total_variation(p, p) == 0.0);

  Distribution q = p;
  q.entries[{0, 1}] = 0.75;
  q.entries[{1, 0}] = 0.25;
  CHECK(std::abs(total_variation(p, q) - 0.25) < 1e-15);

  Distribution a;
  a.entries[{2, 0}] = 1.0;
  a.total_mass = 1.0;
  a.normalized = true;
  Distribution b;
  b.entries[{0, 2}] = 1.0;
  b.total_mass = 1.0;
  b.normalized = true;
  CHECK(total_variation(a, b) == 1.0);

  Distribution bad = a;
  bad.normalized = false;
  CHECK_THROWS_AS(total_variation(bad, b), ValidationError);
}
