#include "gboson/gbs.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "gboson/errors.hpp"

namespace gboson {
namespace {

constexpr int kMaxSeriesTerms = 20000;

// Indices j and M + j for every mode with n_j = 1, ascending within each block.
std::vector<int> selected_indices(const OccupationVector& n) {
  const int m = static_cast<int>(n.modes());
  std::vector<int> idx;
  for (int j = 0; j < m; ++j) {
    if (n[static_cast<std::size_t>(j)] == 1) idx.push_back(j);
  }
  const std::size_t half = idx.size();
  for (std::size_t t = 0; t < half; ++t) idx.push_back(idx[t] + m);
  return idx;
}

void require_binary(const GaussianState& state, const OccupationVector& n) {
  if (static_cast<int>(n.modes()) != state.modes()) {
    throw DimensionError("outcome needs " + std::to_string(state.modes()) + " entries");
  }
  for (int v : n.counts) {
    if (v != 0 && v != 1) throw DomainError("Gaussian outcome formulas hold only for occupations in {0,1}");
  }
}

ComplexMatrix inverse_sigma(const GaussianState& state) {
  Eigen::LDLT<ComplexMatrix> ldlt(state.sigma_q);
  if (ldlt.info() != Eigen::Success || ldlt.vectorD().cwiseAbs().minCoeff() < 1e-14) {
    throw DomainError("sigma_Q is singular");
  }
  return ldlt.solve(ComplexMatrix::Identity(state.modes(), state.modes()));
}

std::vector<double> c1_values(std::span<const GeneralizedBoson> species) {
  std::vector<double> c1;
  c1.reserve(species.size());
  for (const auto& b : species) c1.push_back(log_norm_series(b, 1).c[1]);
  return c1;
}

// Full symmetrized 2M x 2M kernel.
ComplexMatrix full_kernel(const GaussianState& state, std::span<const double> c1) {
  const int m = state.modes();
  if (static_cast<int>(c1.size()) != m) throw DimensionError("need one c1 value per mode");
  const ComplexMatrix inv = inverse_sigma(state);
  ComplexMatrix d = -inv;
  for (int j = 0; j < m; ++j) d(j, j) += c1[static_cast<std::size_t>(j)];
  ComplexMatrix a = ComplexMatrix::Zero(2 * m, 2 * m);
  a.topRightCorner(m, m) = d.conjugate();
  a.bottomLeftCorner(m, m) = d;
  return (a + a.transpose()) / 2.0;
}

ComplexMatrix restrict(const ComplexMatrix& a, const std::vector<int>& idx) {
  const auto k = static_cast<Eigen::Index>(idx.size());
  ComplexMatrix out(k, k);
  for (Eigen::Index r = 0; r < k; ++r) {
    for (Eigen::Index c = 0; c < k; ++c) out(r, c) = a(idx[static_cast<std::size_t>(r)], idx[static_cast<std::size_t>(c)]);
  }
  return out;
}

// e^{c0 M} / (g sqrt|sigma_Q| prod_i |f(n_i)|^2).
double probability_prefactor(std::span<const GeneralizedBoson> species, const GaussianState& state,
                             const OccupationVector& n) {
  double c0_total = 0.0;
  double log_f2 = 0.0;
  for (std::size_t j = 0; j < species.size(); ++j) {
    c0_total += log_norm_series(species[j], 0).c[0];
    log_f2 += 2.0 * log_abs_f(species[j], n[j]);
  }
  const double det = state.sigma_q.determinant().real();
  return std::exp(c0_total - log_f2) / (state.norm_g * std::sqrt(det));
}

double finalize(Complex raw, double prefactor, GbsDiagnostics* diag) {
  double value = prefactor * raw.real();
  if (value < 0.0 && value >= -1e-12) {
    value = 0.0;
    if (diag) ++diag->clipped;
  }
  return value;
}

void require_species(std::span<const GeneralizedBoson> species, const GaussianState& state) {
  if (static_cast<int>(species.size()) != state.modes()) throw DimensionError("need one species per mode");
}

bool has_displacement(const GaussianState& state) {
  return state.displacement && state.displacement->cwiseAbs().maxCoeff() > 0.0;
}

}  // namespace

GaussianState make_gaussian_state(ComplexMatrix sigma_q, std::optional<ComplexVector> displacement) {
  if (sigma_q.rows() == 0 || sigma_q.rows() != sigma_q.cols()) throw DimensionError("sigma_Q must be square");
  if ((sigma_q - sigma_q.adjoint()).cwiseAbs().maxCoeff() > 1e-10) throw ValidationError("sigma_Q must be Hermitian");
  if (displacement && displacement->size() != sigma_q.rows()) throw DimensionError("displacement length must equal M");
  GaussianState state;
  state.sigma_q = (sigma_q + sigma_q.adjoint()) / 2.0;
  state.displacement = std::move(displacement);
  state.norm_g = normalization_constant(state);
  return state;
}

double normalization_constant(const GaussianState& state) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(state.sigma_q, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= 0.0) {
    throw ValidationError("sigma_Q must be positive definite");
  }
  const double log_det = eig.eigenvalues().array().log().sum();
  // Q carries 1/(g sqrt det sigma) and int exp(-alpha^dag sigma^-1 alpha) d^{2M}alpha = pi^M det sigma.
  return std::exp(state.modes() * std::log(std::numbers::pi) + 0.5 * log_det);
}

double coherent_normalization(const GeneralizedBoson& boson, Complex alpha) {
  const double x = std::norm(alpha);
  double sum = 1.0;
  double term = 1.0;
  double ratio = 0.0;
  for (int n = 0; n < kMaxSeriesTerms; ++n) {
    if (n >= boson.max_level()) throw ConvergenceError("custom species table too short for N(alpha)");
    const double w = std::abs(boson.hop_weight(n));
    if (w == 0.0) return sum;
    ratio = x * w / ((n + 1.0) * (n + 1.0));
    term *= ratio;
    sum += term;
    if (!std::isfinite(sum)) break;
    if (ratio < 1.0 && term * ratio / (1.0 - ratio) < 1e-17 * sum) return sum;
  }
  std::ostringstream os;
  os << "N(alpha) series for " << boson.name() << " does not converge at |alpha|=" << std::sqrt(x)
     << " (term ratio " << ratio << ")";
  throw ConvergenceError(os.str());
}

Complex coherent_overlap(const GeneralizedBoson& boson, Complex beta, Complex alpha) {
  const Complex x = std::conj(beta) * alpha;
  Complex sum{1.0, 0.0};
  Complex term{1.0, 0.0};
  bool converged = false;
  for (int n = 0; n < kMaxSeriesTerms; ++n) {
    if (n >= boson.max_level()) throw ConvergenceError("custom species table too short for the overlap series");
    const double w = std::abs(boson.hop_weight(n));
    if (w == 0.0) {
      converged = true;
      break;
    }
    const double ratio = std::abs(x) * w / ((n + 1.0) * (n + 1.0));
    term *= x * (w / ((n + 1.0) * (n + 1.0)));
    sum += term;
    if (!std::isfinite(std::abs(sum))) break;
    if (ratio < 1.0 && std::abs(term) * ratio / (1.0 - ratio) < 1e-17 * std::max(1.0, std::abs(sum))) {
      converged = true;
      break;
    }
  }
  if (!converged) throw ConvergenceError("coherent overlap series for " + boson.name() + " does not converge");
  return sum / std::sqrt(coherent_normalization(boson, alpha) * coherent_normalization(boson, beta));
}

LogNormSeries log_norm_series(const GeneralizedBoson& boson, int order) {
  if (order < 0 || order > 8) throw ValidationError("log_norm_series supports order 0..8");
  // a_n = |f(n)|^2 / (n!)^2
  std::vector<double> a(static_cast<std::size_t>(order) + 1, 0.0);
  a[0] = 1.0;
  for (int n = 0; n < order; ++n) {
    const double w = std::abs(boson.hop_weight(n));
    a[static_cast<std::size_t>(n) + 1] = a[static_cast<std::size_t>(n)] * w / ((n + 1.0) * (n + 1.0));
  }
  // n L_n = n a_n - sum_{k=1}^{n-1} k L_k a_{n-k}
  LogNormSeries out;
  out.c.assign(static_cast<std::size_t>(order) + 1, 0.0);
  for (int n = 1; n <= order; ++n) {
    double acc = n * a[static_cast<std::size_t>(n)];
    for (int k = 1; k < n; ++k) acc -= k * out.c[static_cast<std::size_t>(k)] * a[static_cast<std::size_t>(n - k)];
    out.c[static_cast<std::size_t>(n)] = acc / n;
  }
  return out;
}

ComplexMatrix build_As(const GaussianState& state, std::span<const double> c1_per_mode, const OccupationVector& n) {
  require_binary(state, n);
  return restrict(full_kernel(state, c1_per_mode), selected_indices(n));
}

double gaussian_threshold_probability(std::span<const GeneralizedBoson> species, const GaussianState& state,
                                      const OccupationVector& n, GbsDiagnostics* diag) {
  require_species(species, state);
  require_binary(state, n);
  if (state.modes() > kGbsMaxModes) throw GuardError("gaussian_threshold_probability limited to M <= 6");
  if (has_displacement(state)) throw ValidationError("state is displaced; use displaced_probability");
  const auto c1 = c1_values(species);
  const Complex haf = hafnian_naive(build_As(state, c1, n));
  return finalize(haf, probability_prefactor(species, state, n), diag);
}

double gaussian_threshold_probability(const GeneralizedBoson& boson, const GaussianState& state,
                                      const OccupationVector& n, GbsDiagnostics* diag) {
  const std::vector<GeneralizedBoson> species(static_cast<std::size_t>(state.modes()), boson);
  return gaussian_threshold_probability(species, state, n, diag);
}

double displaced_probability(std::span<const GeneralizedBoson> species, const GaussianState& state,
                             const OccupationVector& n, GbsDiagnostics* diag) {
  require_species(species, state);
  require_binary(state, n);
  if (state.modes() > kDisplacedMaxModes) throw GuardError("displaced_probability limited to M <= 3");
  const int m = state.modes();
  const ComplexVector d = state.displacement ? *state.displacement : ComplexVector::Zero(m);
  const ComplexMatrix inv = inverse_sigma(state);
  const ComplexVector v = inv * d;
  // Linear coefficients: alpha_k -> conj(v_k), alpha*_j -> v_j.
  ComplexVector lin(2 * m);
  lin.head(m) = v.conjugate();
  lin.tail(m) = v;
  const double gauss = std::exp(-(d.adjoint() * v)(0).real());

  const ComplexMatrix a = full_kernel(state, c1_values(species));
  const std::vector<int> idx = selected_indices(n);
  const std::size_t k = idx.size();
  Complex total{0.0, 0.0};
  for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << k); ++mask) {
    if (std::popcount(mask) % 2 != 0) continue;  // odd remainder has no perfect matching
    Complex lin_prod{1.0, 0.0};
    std::vector<int> rest;
    for (std::size_t t = 0; t < k; ++t) {
      if ((mask >> t) & 1U) {
        lin_prod *= lin(idx[t]);
      } else {
        rest.push_back(idx[t]);
      }
    }
    if (lin_prod == Complex{0.0, 0.0}) continue;
    total += lin_prod * hafnian_naive(restrict(a, rest));
  }
  return finalize(total, gauss * probability_prefactor(species, state, n), diag);
}

double displaced_probability(const GeneralizedBoson& boson, const GaussianState& state, const OccupationVector& n,
                             GbsDiagnostics* diag) {
  const std::vector<GeneralizedBoson> species(static_cast<std::size_t>(state.modes()), boson);
  return displaced_probability(species, state, n, diag);
}

double gaussian_probability_oracle(std::span<const GeneralizedBoson> species, const GaussianState& state,
                                   const OccupationVector& n) {
  require_species(species, state);
  require_binary(state, n);
  const int m = state.modes();
  if (m > kGbsOracleMaxModes || n.total() > kGbsOracleMaxParticles) {
    throw GuardError("gaussian_probability_oracle limited to M <= 3, N <= 3");
  }
  // Variables: alpha_j -> bit j, alpha*_j -> bit M + j. Polynomials are kept multilinear:
  // a monomial with a repeated variable cannot contribute to the target coefficient.
  const std::size_t vars = 2 * static_cast<std::size_t>(m);
  const std::size_t size = std::size_t{1} << vars;
  auto bit = [](int v) { return std::size_t{1} << v; };

  const ComplexMatrix inv = inverse_sigma(state);
  const ComplexVector d = state.displacement ? *state.displacement : ComplexVector::Zero(m);
  std::vector<Complex> exponent(size, Complex{0.0, 0.0});
  for (int j = 0; j < m; ++j) {
    for (int k = 0; k < m; ++k) {
      // alpha*_j alpha_k coefficient of c1 |alpha|^2 - alpha^dag sigma^-1 alpha
      Complex coef = -inv(j, k);
      if (j == k) coef += log_norm_series(species[static_cast<std::size_t>(j)], 1).c[1];
      exponent[bit(m + j) | bit(k)] += coef;
    }
  }
  // Linear part of -(alpha-d)^dag sigma^-1 (alpha-d): d^dag sigma^-1 alpha + alpha^dag sigma^-1 d.
  Complex constant{0.0, 0.0};
  for (int j = 0; j < m; ++j) {
    for (int k = 0; k < m; ++k) {
      exponent[bit(k)] += std::conj(d(j)) * inv(j, k);
      exponent[bit(m + j)] += inv(j, k) * d(k);
      constant -= std::conj(d(j)) * inv(j, k) * d(k);
    }
  }

  std::size_t target = 0;
  for (int j = 0; j < m; ++j) {
    if (n[static_cast<std::size_t>(j)] == 1) target |= bit(j) | bit(m + j);
  }

  // exp(E) = sum_p E^p / p!, truncated at the target's total degree.
  const int max_degree = std::popcount(target);
  std::vector<Complex> power(size, Complex{0.0, 0.0});
  power[0] = 1.0;
  Complex coefficient = power[target];
  for (int p = 1; p <= max_degree; ++p) {
    std::vector<Complex> next(size, Complex{0.0, 0.0});
    for (std::size_t a = 0; a < size; ++a) {
      if (power[a] == Complex{0.0, 0.0}) continue;
      for (std::size_t b = 1; b < size; ++b) {
        if ((a & b) != 0 || exponent[b] == Complex{0.0, 0.0}) continue;
        next[a | b] += power[a] * exponent[b];
      }
    }
    for (auto& c : next) c /= static_cast<double>(p);
    power = std::move(next);
    coefficient += power[target];
  }

  const double prefactor = probability_prefactor(species, state, n) * std::exp(constant.real());
  return prefactor * coefficient.real();
}

double gaussian_probability_oracle(const GeneralizedBoson& boson, const GaussianState& state, const OccupationVector& n) {
  const std::vector<GeneralizedBoson> species(static_cast<std::size_t>(state.modes()), boson);
  return gaussian_probability_oracle(species, state, n);
}

Distribution gaussian_binary_distribution(const GeneralizedBoson& boson, const GaussianState& state,
                                          GbsDiagnostics* diag) {
  const int m = state.modes();
  Distribution dist;
  const bool displaced = has_displacement(state);
  for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << m); ++mask) {
    std::vector<int> counts(static_cast<std::size_t>(m), 0);
    for (int j = 0; j < m; ++j) counts[static_cast<std::size_t>(j)] = static_cast<int>((mask >> (m - 1 - j)) & 1U);
    OccupationVector n(std::move(counts));
    const double p = displaced ? displaced_probability(boson, state, n, diag)
                               : gaussian_threshold_probability(boson, state, n, diag);
    dist.total_mass += p;
    dist.entries.emplace(std::move(n), p);
  }
  dist.normalized = std::abs(dist.total_mass - 1.0) < 1e-9;
  return dist;
}

}  // namespace gboson
