#pragma once

// Combinatorial matrix kernels: permanents, hafnians, repeated-index
// submatrices and Haar-random mode unitaries.

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <span>

namespace gboson {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

/// Max-norm of U^dagger U - I.
double unitarity_residual(const ComplexMatrix& u);

/// An M x M linear mode transformation. Unitary to 1e-10 unless built with allow_non_unitary.
class ModeUnitary {
 public:
  explicit ModeUnitary(ComplexMatrix matrix, bool allow_non_unitary = false);

  int dim() const { return static_cast<int>(matrix_.rows()); }
  const ComplexMatrix& matrix() const { return matrix_; }
  double unitarity_residual() const { return residual_; }
  bool unitary() const { return residual_ < 1e-10; }

  Complex operator()(int row, int col) const { return matrix_(row, col); }

 private:
  ComplexMatrix matrix_;
  double residual_;
};

inline constexpr int kNaivePermanentMax = 10;
inline constexpr int kFastPermanentMax = 30;
inline constexpr int kHafnianMax = 16;

/// Sum over all permutations. Reference implementation, n <= 10.
Complex permanent_naive(const ComplexMatrix& a);

/// Glynn's formula with Gray-code ordering, O(2^(n-1) n), n <= 30.
/// threads > 1 splits the Gray sequence into fixed chunks; the result does not depend on the thread count.
Complex permanent_fast(const ComplexMatrix& a, int threads = 1);

/// Sum over perfect matchings. Requires a symmetric matrix (1e-10), n <= 16.
/// Odd dimension gives 0, the empty matrix gives 1.
Complex hafnian_naive(const ComplexMatrix& a);

/// Lambda[k|l]: column i of the unitary repeated l_i times and row j repeated k_j times,
/// both in ascending mode order.
ComplexMatrix submatrix_repeat(const ModeUnitary& u, std::span<const int> k, std::span<const int> l);

/// Haar-distributed unitary from QR of a complex Ginibre matrix with the R-diagonal phase fix.
/// Deterministic in (dim, seed).
ModeUnitary haar_unitary(int dim, std::uint64_t seed);

}  // namespace gboson
