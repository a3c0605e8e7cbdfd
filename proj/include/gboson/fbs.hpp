#pragma once

// Fock-state boson sampling for generalized bosons.

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <vector>

#include "gboson/algebra.hpp"
#include "gboson/exactlinalg.hpp"

namespace gboson {

/// Per-mode occupation numbers; ordered lexicographically.
struct OccupationVector {
  std::vector<int> counts;

  OccupationVector() = default;
  explicit OccupationVector(std::vector<int> c) : counts(std::move(c)) {}
  OccupationVector(std::initializer_list<int> c) : counts(c) {}

  std::size_t modes() const { return counts.size(); }
  int total() const;
  int operator[](std::size_t i) const { return counts[i]; }

  auto operator<=>(const OccupationVector&) const = default;
  bool operator==(const OccupationVector&) const = default;
};

/// Probabilities keyed by outcome, iterated in lexicographic order.
struct Distribution {
  std::map<OccupationVector, double> entries;
  /// Sum of the probabilities before any renormalization.
  double total_mass = 0.0;
  bool normalized = false;

  double probability(const OccupationVector& k) const;
};

enum class NormalizationPolicy { Raw, Renormalize };

/// Output probability |prod_i f(k_i)/(f(l_i) k_i!)|^2 |Perm(Lambda[k|l])|^2.
double outcome_probability(const GeneralizedBoson& boson, const ModeUnitary& u, const OccupationVector& l,
                           const OccupationVector& k);

inline constexpr int kOracleMaxParticles = 8;
inline constexpr int kOracleMaxModes = 6;

/// Output amplitude from the multinomial expansion of prod_i (sum_j U_ji x_j)^{l_i}.
/// Independent of any permanent evaluation. N <= 8, M <= 6.
Complex amplitude_oracle(const GeneralizedBoson& boson, const ModeUnitary& u, const OccupationVector& l,
                         const OccupationVector& k);

/// Compositions of n into `modes` parts, each part < local_dim when given, in lexicographic order.
std::vector<OccupationVector> enumerate_outcomes(int modes, int n, std::optional<int> local_dim = std::nullopt);

/// Permanent-formula probabilities over every outcome with the input's particle number.
Distribution full_distribution(const GeneralizedBoson& boson, const ModeUnitary& u, const OccupationVector& l,
                               NormalizationPolicy policy, int threads = 1);

/// I.i.d. draws by inverse CDF over the lexicographic outcome order.
std::vector<OccupationVector> sample(const Distribution& dist, std::size_t count, std::uint64_t seed);

/// Half the L1 distance; keys missing from one side count as zero.
double total_variation(const Distribution& p, const Distribution& q);

/// Throws unless total_mass is 1 within 1e-9 and the normalized flag is set.
void require_normalized(const Distribution& dist, const char* what);

}  // namespace gboson
