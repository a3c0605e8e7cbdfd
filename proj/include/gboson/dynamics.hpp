#pragma once

// State-vector dynamics on truncated multimode Fock spaces: quadratic
// generalized-boson Hamiltonians, exact propagation, the in/out mode-swapping
// construction of linear mode mixing, and platform coupling formulas.

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <cstdint>
#include <optional>
#include <span>
#include <tuple>
#include <vector>

#include "gboson/algebra.hpp"
#include "gboson/exactlinalg.hpp"
#include "gboson/fbs.hpp"

namespace gboson {

using ComplexVector = Eigen::VectorXcd;

inline constexpr std::int64_t kMaxSpaceDimension = 2'000'000;
inline constexpr std::int64_t kMaxDenseDimension = 4000;

/// Truncated product space; mode 0 is the most significant digit of the flat index.
class FockSpace {
 public:
  FockSpace(int modes, std::vector<int> cutoffs);

  int modes() const { return static_cast<int>(cutoffs_.size()); }
  const std::vector<int>& cutoffs() const { return cutoffs_; }
  std::int64_t dimension() const { return dimension_; }
  std::int64_t stride(int mode) const { return strides_[static_cast<std::size_t>(mode)]; }

  std::int64_t index(std::span<const int> occupation) const;
  std::vector<int> occupation(std::int64_t index) const;

 private:
  std::vector<int> cutoffs_;
  std::vector<std::int64_t> strides_;
  std::int64_t dimension_ = 1;
};

FockSpace build_space(int modes, std::vector<int> cutoffs);

struct FockState {
  FockSpace space;
  ComplexVector amplitudes;

  /// Normalized basis state |occupation>.
  static FockState basis(const FockSpace& space, std::span<const int> occupation);
  double norm() const { return amplitudes.norm(); }
};

using SparseMatrix = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

struct Triplet {
  std::int64_t row;
  std::int64_t col;
  Complex value;
};

class SparseOperator {
 public:
  explicit SparseOperator(SparseMatrix matrix) : matrix_(std::move(matrix)) {}

  std::int64_t dimension() const { return matrix_.rows(); }
  const SparseMatrix& matrix() const { return matrix_; }
  /// Row-major sorted, duplicates merged, explicit zeros dropped.
  std::vector<Triplet> triplets() const;
  /// Max entrywise |H - H^dagger|.
  double hermiticity_residual() const;

 private:
  SparseMatrix matrix_;
};

/// H = sum_ij J_ij b_i^dagger b_j; hops past a cutoff are dropped.
SparseOperator build_quadratic(const GeneralizedBoson& boson, const ComplexMatrix& j, const FockSpace& space);

/// Total occupation operator on the space (diagonal).
SparseOperator number_operator(const FockSpace& space);

/// Block matrix [[0, R^dagger], [R, 0]] over in-modes 0..M-1 and out-modes M..2M-1.
ComplexMatrix bs_coupling_matrix(const ModeUnitary& r);

/// H = sum_ij R_ji b_{j,out}^dagger b_{i,in} + h.c. on a 2M-mode space.
SparseOperator build_bs_hamiltonian(const GeneralizedBoson& boson, const ModeUnitary& r, const FockSpace& space);

/// exp(-i H t)|psi> by Chebyshev expansion with Gershgorin spectral bounds.
FockState evolve(const FockState& state, const SparseOperator& h, double t, double tol = 1e-12);

/// Reference propagator through a dense Hermitian eigendecomposition (dimension <= 4000).
FockState evolve_dense(const FockState& state, const SparseOperator& h, double t);

struct TrotterSegment {
  ComplexMatrix coupling;
  double duration = 0.0;
};

/// Applies the segments in order, each as an exact evolution under its quadratic Hamiltonian.
FockState trotter_evolve(const GeneralizedBoson& boson, const FockState& state, std::span<const TrotterSegment> schedule,
                         double tol = 1e-12);

/// First-order splitting: `steps` repetitions of (term_0, dt), (term_1, dt), ...
std::vector<TrotterSegment> first_order_schedule(std::span<const ComplexMatrix> terms, double total_time, int steps);

/// Default cutoffs for a 2M-mode swap simulation with n particles: local_dim when finite, else n + 1.
std::vector<int> default_cutoffs(const GeneralizedBoson& boson, int modes, int particles);

struct SwapResult {
  /// Output-mode marginal of |psi(t)|^2, summed over the residual input-mode occupations.
  Distribution distribution;
  /// Probability left with at least one excitation in the input modes.
  double leakage = 0.0;
  double evolution_time = 0.0;
  double norm_error = 0.0;
};

/// Evolves |l>_in |0>_out under the mode-swapping Hamiltonian for a half period
/// t = pi / (2 |w(0)|), i.e. pi/2 in units of the single-excitation hop.
SwapResult peropadre_distribution(const GeneralizedBoson& boson, const ModeUnitary& r, const OccupationVector& l,
                                  std::optional<std::vector<int>> cutoffs = std::nullopt);

struct ScalingTable {
  std::vector<int> modes;
  std::vector<double> mean_tv;
  std::vector<double> stderr_tv;
  /// Least-squares slope of log(mean TV) against log(M); NaN when fewer than two points or any mean TV <= 1e-12.
  double fitted_exponent = 0.0;
};

/// For each M: Haar R per trial, collision-free input on the first N modes, TV distance of the
/// swap output to the ideal linear-optics (standard boson) distribution.
ScalingTable tv_scaling_experiment(const GeneralizedBoson& boson, int particles, std::span<const int> modes_list,
                                   int trials, std::uint64_t seed, int threads = 1);

/// Seed of trial `trial` at mode count `modes` derived from a base seed.
std::uint64_t trial_seed(std::uint64_t base, int modes, int trial);

/// J_ij = g_i g_j^* / delta - chi delta_ij.
ComplexMatrix cqed_coupling(std::span<const Complex> g, double delta, double chi);

/// Effective superspin couplings J^(ij) = J0 N dt_ij / sum_{k<l} dt_kl w_kl, where w_kl is the mean of
/// |alpha - beta|^zeta over ion pairs (alpha in superspin k, beta in superspin l) on a chain in which
/// superspin k holds ions kN .. kN + N - 1.
Eigen::MatrixXd ion_superspin_couplings(double j0, double zeta, int ions_per_superspin, int superspins,
                                        const Eigen::MatrixXd& dt);

/// Largest coupling over superspin pairs.
double ion_superspin_coupling(double j0, double zeta, int ions_per_superspin, int superspins, const Eigen::MatrixXd& dt);

}  // namespace gboson
