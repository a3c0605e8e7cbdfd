#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "gboson/errors.hpp"
#include "gboson/exactlinalg.hpp"
#include "oracles.hpp"

using namespace gboson;

namespace {

double rel_err(Complex a, Complex b) { return std::abs(a - b) / std::max(1e-300, std::max(std::abs(a), std::abs(b))); }

ComplexMatrix permutation_matrix(const std::vector<int>& p) {
  const auto n = static_cast<Eigen::Index>(p.size());
  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) m(i, p[static_cast<std::size_t>(i)]) = 1.0;
  return m;
}

}  // namespace

TEST_CASE("permanent_naive examples") {
  CHECK(permanent_naive(ComplexMatrix::Identity(3, 3)) == Complex{1.0, 0.0});
  CHECK(permanent_naive(ComplexMatrix::Ones(2, 2)) == Complex{2.0, 0.0});
  ComplexMatrix bs(2, 2);
  bs << 1.0, 1.0, 1.0, -1.0;
  bs /= std::sqrt(2.0);
  CHECK(std::abs(permanent_naive(bs)) < 1e-15);
  CHECK(permanent_naive(ComplexMatrix(0, 0)) == Complex{1.0, 0.0});
  CHECK_THROWS_AS(permanent_naive(ComplexMatrix::Ones(11, 11)), GuardError);
  CHECK_THROWS_AS(permanent_naive(ComplexMatrix::Ones(2, 3)), DimensionError);
}

TEST_CASE("permanent_fast examples") {
  CHECK(permanent_fast(ComplexMatrix::Identity(20, 20)) == Complex{1.0, 0.0});
  CHECK(permanent_fast(ComplexMatrix::Ones(8, 8)) == Complex{40320.0, 0.0});
  const ComplexMatrix a = oracle::random_complex(6, 6, 11);
  CHECK(rel_err(permanent_fast(a), permanent_naive(a)) < 1e-10);
  CHECK_THROWS_AS(permanent_fast(ComplexMatrix::Ones(31, 31)), GuardError);
}

TEST_CASE("permanent_fast equals permanent_naive on 200 instances") {
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const int n = 2 + i % 7;
    const ComplexMatrix a = oracle::random_complex(n, n, 1000 + static_cast<std::uint64_t>(i));
    worst = std::max(worst, rel_err(permanent_fast(a), permanent_naive(a)));
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("permanent is invariant under row and column permutations") {
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 3 + trial % 5;
    const ComplexMatrix a = oracle::random_complex(n, n, 50 + static_cast<std::uint64_t>(trial));
    std::vector<int> p(static_cast<std::size_t>(n));
    std::vector<int> q(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), 0);
    std::iota(q.begin(), q.end(), 0);
    std::rotate(p.begin(), p.begin() + 1, p.end());
    std::reverse(q.begin(), q.end());
    const ComplexMatrix b = permutation_matrix(p) * a * permutation_matrix(q);
    CHECK(rel_err(permanent_fast(b), permanent_fast(a)) < 1e-10);
  }
}

TEST_CASE("permanent_fast is independent of the thread count") {
  const ComplexMatrix a = oracle::random_complex(18, 18, 99);
  const Complex one = permanent_fast(a, 1);
  CHECK(permanent_fast(a, 4) == one);
  CHECK(permanent_fast(a, 3) == one);
}

TEST_CASE("hafnian examples") {
  ComplexMatrix two(2, 2);
  const Complex c{0.3, -1.2};
  two << 0.0, c, c, 0.0;
  CHECK(hafnian_naive(two) == c);

  ComplexMatrix odd = oracle::random_complex(3, 3, 5);
  odd = (odd + odd.transpose()).eval();
  CHECK(hafnian_naive(odd) == Complex{0.0, 0.0});

  ComplexMatrix s = oracle::random_complex(4, 4, 6);
  s = (s + s.transpose()).eval();
  const Complex expect = s(0, 1) * s(2, 3) + s(0, 2) * s(1, 3) + s(0, 3) * s(1, 2);
  CHECK(std::abs(hafnian_naive(s) - expect) < 1e-13);

  CHECK(hafnian_naive(ComplexMatrix(0, 0)) == Complex{1.0, 0.0});
  CHECK_THROWS_AS(hafnian_naive(oracle::random_complex(4, 4, 7)), ValidationError);
  CHECK_THROWS_AS(hafnian_naive(ComplexMatrix::Ones(18, 18)), GuardError);
}

TEST_CASE("hafnian of bipartite block equals permanent") {
  for (int n = 1; n <= 6; ++n) {
    const ComplexMatrix a = oracle::random_complex(n, n, 300 + static_cast<std::uint64_t>(n));
    ComplexMatrix block = ComplexMatrix::Zero(2 * n, 2 * n);
    block.topRightCorner(n, n) = a;
    block.bottomLeftCorner(n, n) = a.transpose();
    CHECK(rel_err(hafnian_naive(block), permanent_naive(a)) < 1e-10);
  }
}

TEST_CASE("submatrix_repeat") {
  const ModeUnitary u = haar_unitary(3, 4);
  const std::vector<int> ones = {1, 1, 1};
  CHECK((submatrix_repeat(u, ones, ones) - u.matrix()).cwiseAbs().maxCoeff() == 0.0);

  const ModeUnitary v = haar_unitary(2, 8);
  const std::vector<int> l = {2, 0};
  const std::vector<int> k = {1, 1};
  const ComplexMatrix s = submatrix_repeat(v, k, l);
  REQUIRE(s.rows() == 2);
  CHECK(s(0, 0) == v(0, 0));
  CHECK(s(0, 1) == v(0, 0));
  CHECK(s(1, 0) == v(1, 0));
  CHECK(s(1, 1) == v(1, 0));

  const ComplexMatrix t = submatrix_repeat(v, l, l);
  CHECK((t.array() == v(0, 0)).all());
  CHECK(std::abs(permanent_naive(t) - 2.0 * v(0, 0) * v(0, 0)) < 1e-15);

  const std::vector<int> bad = {1, 0};
  CHECK_THROWS_AS(submatrix_repeat(v, bad, l), ValidationError);
}

TEST_CASE("haar_unitary") {
  CHECK(haar_unitary(4, 7).unitarity_residual() < 1e-12);
  for (std::uint64_t seed : {1ULL, 2ULL, 77ULL}) {
    const ModeUnitary one = haar_unitary(1, seed);
    CHECK(std::abs(std::abs(one(0, 0)) - 1.0) < 1e-14);
  }
  const ModeUnitary a = haar_unitary(5, 123);
  const ModeUnitary b = haar_unitary(5, 123);
  CHECK((a.matrix().array() == b.matrix().array()).all());
  CHECK((a.matrix() - haar_unitary(5, 124).matrix()).cwiseAbs().maxCoeff() > 1e-3);
}

TEST_CASE("haar second moment") {
  double mean = 0.0;
  const int draws = 10000;
  for (int s = 0; s < draws; ++s) mean += std::norm(haar_unitary(4, static_cast<std::uint64_t>(s))(0, 0));
  mean /= draws;
  CHECK(std::abs(mean - 0.25) < 0.01);
}

TEST_CASE("ModeUnitary validation") {
  CHECK_THROWS_AS(ModeUnitary(ComplexMatrix::Ones(2, 2)), ValidationError);
  CHECK_NOTHROW(ModeUnitary(ComplexMatrix::Ones(2, 2), true));
  CHECK_THROWS_AS(ModeUnitary(ComplexMatrix::Identity(2, 3)), DimensionError);
}
