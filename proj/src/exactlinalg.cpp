#include "gboson/exactlinalg.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "gboson/errors.hpp"
#include "gboson/parallel.hpp"

namespace gboson {

double unitarity_residual(const ComplexMatrix& u) {
  if (u.rows() != u.cols()) return std::numeric_limits<double>::infinity();
  const ComplexMatrix defect = u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols());
  return defect.cwiseAbs().maxCoeff();
}

ModeUnitary::ModeUnitary(ComplexMatrix matrix, bool allow_non_unitary) : matrix_(std::move(matrix)) {
  if (matrix_.rows() == 0 || matrix_.rows() != matrix_.cols()) {
    throw DimensionError("mode unitary must be a non-empty square matrix");
  }
  residual_ = gboson::unitarity_residual(matrix_);
  if (!allow_non_unitary && !(residual_ < 1e-10)) {
    throw ValidationError("matrix is not unitary (residual " + std::to_string(residual_) + ")");
  }
}

Complex permanent_naive(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("permanent requires a square matrix");
  const int n = static_cast<int>(a.rows());
  if (n > kNaivePermanentMax) throw GuardError("permanent_naive limited to n <= 10");
  if (n == 0) return {1.0, 0.0};
  std::vector<int> sigma(static_cast<std::size_t>(n));
  std::iota(sigma.begin(), sigma.end(), 0);
  Complex total{0.0, 0.0};
  do {
    Complex term{1.0, 0.0};
    for (int i = 0; i < n; ++i) term *= a(i, sigma[static_cast<std::size_t>(i)]);
    total += term;
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return total;
}

namespace {

// Glynn sum over a contiguous range [begin, end) of the Gray sequence on delta_1..delta_{n-1}.
Complex glynn_range(const ComplexMatrix& a, std::uint64_t begin, std::uint64_t end) {
  const int n = static_cast<int>(a.rows());
  std::uint64_t gray = begin ^ (begin >> 1);
  std::vector<Complex> col_sums(static_cast<std::size_t>(n), Complex{0.0, 0.0});
  std::vector<double> delta(static_cast<std::size_t>(n), 1.0);
  for (int i = 1; i < n; ++i) {
    if ((gray >> (i - 1)) & 1U) delta[static_cast<std::size_t>(i)] = -1.0;
  }
  for (int j = 0; j < n; ++j) {
    Complex s{0.0, 0.0};
    for (int i = 0; i < n; ++i) s += delta[static_cast<std::size_t>(i)] * a(i, j);
    col_sums[static_cast<std::size_t>(j)] = s;
  }
  double sign = (std::popcount(gray) % 2 == 0) ? 1.0 : -1.0;

  Complex total{0.0, 0.0};
  for (std::uint64_t g = begin; g < end; ++g) {
    Complex prod{1.0, 0.0};
    for (const Complex& s : col_sums) prod *= s;
    total += sign * prod;
    if (g + 1 == end) break;
    const int i = std::countr_zero(g + 1) + 1;
    double& d = delta[static_cast<std::size_t>(i)];
    d = -d;
    for (int j = 0; j < n; ++j) col_sums[static_cast<std::size_t>(j)] += 2.0 * d * a(i, j);
    sign = -sign;
  }
  return total;
}

}  // namespace

Complex permanent_fast(const ComplexMatrix& a, int threads) {
  if (a.rows() != a.cols()) throw DimensionError("permanent requires a square matrix");
  const int n = static_cast<int>(a.rows());
  if (n > kFastPermanentMax) throw GuardError("permanent_fast limited to n <= 30");
  if (n == 0) return {1.0, 0.0};
  if (n == 1) return a(0, 0);

  const std::uint64_t terms = std::uint64_t{1} << (n - 1);
  // Chunk layout depends only on n, so the summation order is fixed.
  const std::uint64_t chunks = terms >= (std::uint64_t{1} << 16) ? 64 : 1;
  const std::uint64_t chunk_len = terms / chunks;
  std::vector<Complex> partial(static_cast<std::size_t>(chunks));
  parallel_for(static_cast<std::size_t>(chunks), threads, [&](std::size_t c) {
    const std::uint64_t begin = c * chunk_len;
    partial[c] = glynn_range(a, begin, begin + chunk_len);
  });
  Complex total{0.0, 0.0};
  for (const Complex& p : partial) total += p;
  return total / static_cast<double>(terms);
}

namespace {

Complex hafnian_rec(const ComplexMatrix& a, std::uint32_t remaining) {
  if (remaining == 0) return {1.0, 0.0};
  const int first = std::countr_zero(remaining);
  std::uint32_t rest = remaining & ~(std::uint32_t{1} << first);
  Complex total{0.0, 0.0};
  for (std::uint32_t scan = rest; scan != 0; scan &= scan - 1) {
    const int partner = std::countr_zero(scan);
    total += a(first, partner) * hafnian_rec(a, rest & ~(std::uint32_t{1} << partner));
  }
  return total;
}

}  // namespace

Complex hafnian_naive(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("hafnian requires a square matrix");
  const int n = static_cast<int>(a.rows());
  if (n > kHafnianMax) throw GuardError("hafnian_naive limited to n <= 16");
  if (n > 0 && (a - a.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
    throw ValidationError("hafnian requires a symmetric matrix");
  }
  if (n % 2 == 1) return {0.0, 0.0};
  return hafnian_rec(a, n == 0 ? 0U : ((std::uint32_t{1} << n) - 1U));
}

ComplexMatrix submatrix_repeat(const ModeUnitary& u, std::span<const int> k, std::span<const int> l) {
  const auto m = static_cast<std::size_t>(u.dim());
  if (k.size() != m || l.size() != m) throw DimensionError("occupation vectors must have one entry per mode");
  std::vector<int> rows;
  std::vector<int> cols;
  for (std::size_t j = 0; j < m; ++j) {
    if (k[j] < 0 || l[j] < 0) throw ValidationError("occupations must be non-negative");
    rows.insert(rows.end(), static_cast<std::size_t>(k[j]), static_cast<int>(j));
    cols.insert(cols.end(), static_cast<std::size_t>(l[j]), static_cast<int>(j));
  }
  if (rows.size() != cols.size()) throw ValidationError("particle-number mismatch between input and output");
  const auto n = static_cast<Eigen::Index>(rows.size());
  ComplexMatrix out(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) out(r, c) = u(rows[static_cast<std::size_t>(r)], cols[static_cast<std::size_t>(c)]);
  }
  return out;
}

ModeUnitary haar_unitary(int dim, std::uint64_t seed) {
  if (dim < 1) throw ValidationError("haar_unitary requires dim >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix z(dim, dim);
  const double scale = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      const double re = normal(rng);
      const double im = normal(rng);
      z(i, j) = Complex{re, im} * scale;
    }
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(dim, dim);
  const ComplexMatrix& r = qr.matrixQR();
  for (int j = 0; j < dim; ++j) {
    const Complex d = r(j, j);
    const double mag = std::abs(d);
    q.col(j) *= mag == 0.0 ? Complex{1.0, 0.0} : d / mag;
  }
  return ModeUnitary(std::move(q));
}

}  // namespace gboson
