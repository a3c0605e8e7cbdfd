#pragma once

// Independent reference values used by the tests. Nothing here calls into the
// code under test except for constructing inputs.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

namespace oracle {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

inline double factorial(int n) {
  double r = 1.0;
  for (int k = 2; k <= n; ++k) r *= k;
  return r;
}

inline double f_standard(int n) { return std::sqrt(factorial(n)); }
inline double f_boson_pair(int n) { return std::sqrt(factorial(2 * n)); }

/// sqrt(n! (2S)! / (2S - n)!), zero beyond 2S.
inline double f_spin(int two_s, int n) {
  if (n > two_s) return 0.0;
  return std::sqrt(factorial(n) * factorial(two_s) / factorial(two_s - n));
}

/// (q^n - q^-n) / (q - q^-1) for real q != +-1.
inline double q_number_closed(double q, int n) { return (std::pow(q, n) - std::pow(q, -n)) / (q - 1.0 / q); }

inline Matrix random_complex(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix a(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) a(r, c) = Complex(g(rng), g(rng));
  }
  return a;
}

inline Matrix random_hermitian(int m, std::uint64_t seed) {
  const Matrix a = random_complex(m, m, seed);
  return (a + a.adjoint()) / 2.0;
}

/// Hermitian with eigenvalues drawn uniformly from (lo, hi).
inline Matrix random_sigma(int m, std::uint64_t seed, double lo = 1.2, double hi = 4.8) {
  std::mt19937_64 rng(seed ^ 0xA5A5A5A5ULL);
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::HouseholderQR<Matrix> qr(random_complex(m, m, seed));
  const Matrix q = qr.householderQ();
  Eigen::VectorXd ev(m);
  for (int i = 0; i < m; ++i) ev(i) = u(rng);
  Matrix s = q * ev.cast<Complex>().asDiagonal() * q.adjoint();
  return (s + s.adjoint()) / 2.0;
}

/// exp(-i H t) v by scaling and squaring of a Taylor series on the dense matrix.
inline Eigen::VectorXcd expm_apply(const Matrix& h, double t, const Eigen::VectorXcd& v) {
  Matrix a = Complex(0.0, -t) * h;
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  while (norm / std::pow(2.0, squarings) > 0.25) ++squarings;
  a /= std::pow(2.0, squarings);
  Matrix result = Matrix::Identity(h.rows(), h.cols());
  Matrix term = Matrix::Identity(h.rows(), h.cols());
  for (int k = 1; k <= 30; ++k) {
    term = term * a / static_cast<double>(k);
    result += term;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result * v;
}

/// Integral of exp(-|alpha|^2 / s) over a disc of radius r, by the midpoint rule in polar coordinates.
inline double gaussian_disc_integral(double s, double r, int radial = 4000) {
  const double dr = r / radial;
  double sum = 0.0;
  for (int i = 0; i < radial; ++i) {
    const double rho = (i + 0.5) * dr;
    sum += std::exp(-rho * rho / s) * rho * dr;
  }
  return 2.0 * std::numbers::pi * sum;
}

/// Upper 99.9% quantile of the chi-square distribution with 5 degrees of freedom.
inline constexpr double kChiSquare999Df5 = 20.515;

}  // namespace oracle
