#pragma once

// Gaussian formalism for generalized bosons: coherent-state normalization,
// the log-normalization series, and threshold-outcome probabilities of states
// with a Gaussian Q-function.
//
// Convention. With abar = (alpha, alpha*) the Gaussian Q-function is
//
//   Q(alpha) = exp(-1/2 (abar - dbar)^dagger Sigma^-1 (abar - dbar)) / (g sqrt|sigma_Q|),
//   Sigma = sigma_Q (+) conj(sigma_Q),
//
// so the exponent equals -(alpha - d)^dagger sigma_Q^-1 (alpha - d) for the M x M
// Hermitian sigma_Q stored here. In this form the binary-outcome kernel is
//
//   A = [[0, C - conj(sigma_Q^-1)], [C - sigma_Q^-1, 0]],   C = diag(c1^(i)),
//
// which is X (I_2M - Sigma^-1) for standard bosons (c1 = 1).

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <vector>

#include "gboson/algebra.hpp"
#include "gboson/exactlinalg.hpp"
#include "gboson/fbs.hpp"

namespace gboson {

using ComplexVector = Eigen::VectorXcd;

struct GaussianState {
  ComplexMatrix sigma_q;
  std::optional<ComplexVector> displacement;
  double norm_g = 0.0;

  int modes() const { return static_cast<int>(sigma_q.rows()); }
};

/// Validates sigma_q (Hermitian to 1e-10, positive definite) and fills norm_g.
GaussianState make_gaussian_state(ComplexMatrix sigma_q, std::optional<ComplexVector> displacement = std::nullopt);

/// g such that the Q-function integrates to one: g = pi^M sqrt(det sigma_Q).
double normalization_constant(const GaussianState& state);

/// N(alpha) = sum_n |alpha|^{2n} |f(n)|^2 / (n!)^2, with adaptive truncation.
/// Throws ConvergenceError outside the radius of convergence.
double coherent_normalization(const GeneralizedBoson& boson, Complex alpha);

/// <beta|alpha> = (N(alpha) N(beta))^{-1/2} sum_n (beta* alpha)^n |f(n)|^2 / (n!)^2.
Complex coherent_overlap(const GeneralizedBoson& boson, Complex beta, Complex alpha);

struct LogNormSeries {
  /// c[j] is the coefficient of |alpha|^{2j} in ln N(|alpha|).
  std::vector<double> c;
};

/// Coefficients c_0..c_order of ln N as a power series in |alpha|^2 (order <= 8).
LogNormSeries log_norm_series(const GeneralizedBoson& boson, int order);

/// Kernel matrix restricted to the modes with n_j = 1 (rows/cols j and M + j), symmetrized.
ComplexMatrix build_As(const GaussianState& state, std::span<const double> c1_per_mode, const OccupationVector& n);

/// Counts tiny negative probabilities that were clipped to zero.
struct GbsDiagnostics {
  int clipped = 0;
};

inline constexpr int kGbsMaxModes = 6;
inline constexpr int kGbsOracleMaxModes = 3;
inline constexpr int kGbsOracleMaxParticles = 3;
inline constexpr int kDisplacedMaxModes = 3;

/// Hafnian formula for a binary outcome n of an undisplaced state.
double gaussian_threshold_probability(const GeneralizedBoson& boson, const GaussianState& state,
                                      const OccupationVector& n, GbsDiagnostics* diag = nullptr);
double gaussian_threshold_probability(std::span<const GeneralizedBoson> species_per_mode, const GaussianState& state,
                                      const OccupationVector& n, GbsDiagnostics* diag = nullptr);

/// Independent check: Taylor-coefficient extraction from exp of the quadratic
/// (plus linear, when displaced) generating polynomial. M <= 3, N <= 3.
double gaussian_probability_oracle(const GeneralizedBoson& boson, const GaussianState& state, const OccupationVector& n);
double gaussian_probability_oracle(std::span<const GeneralizedBoson> species_per_mode, const GaussianState& state,
                                   const OccupationVector& n);

/// Partition sum over subsets B of the selected indices: prod_{k in B} F_k * Haf(A without B). M <= 3.
double displaced_probability(const GeneralizedBoson& boson, const GaussianState& state, const OccupationVector& n,
                             GbsDiagnostics* diag = nullptr);
double displaced_probability(std::span<const GeneralizedBoson> species_per_mode, const GaussianState& state,
                             const OccupationVector& n, GbsDiagnostics* diag = nullptr);

/// All binary outcomes of an M-mode state in lexicographic order (raw values, not renormalized).
Distribution gaussian_binary_distribution(const GeneralizedBoson& boson, const GaussianState& state,
                                          GbsDiagnostics* diag = nullptr);

}  // namespace gboson
