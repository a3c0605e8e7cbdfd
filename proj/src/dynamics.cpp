#include "gboson/dynamics.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "gboson/errors.hpp"
#include "gboson/parallel.hpp"

namespace gboson {

FockSpace::FockSpace(int modes, std::vector<int> cutoffs) : cutoffs_(std::move(cutoffs)) {
  if (modes < 1 || static_cast<int>(cutoffs_.size()) != modes) {
    throw DimensionError("need one cutoff per mode");
  }
  strides_.assign(cutoffs_.size(), 1);
  for (int i = modes - 1; i >= 0; --i) {
    const int d = cutoffs_[static_cast<std::size_t>(i)];
    if (d < 1) throw ValidationError("cutoffs must be positive");
    strides_[static_cast<std::size_t>(i)] = dimension_;
    if (dimension_ > kMaxSpaceDimension / d) throw GuardError("Fock space dimension exceeds 2e6");
    dimension_ *= d;
  }
}

std::int64_t FockSpace::index(std::span<const int> occupation) const {
  if (occupation.size() != cutoffs_.size()) throw DimensionError("occupation length does not match the space");
  std::int64_t idx = 0;
  for (std::size_t i = 0; i < cutoffs_.size(); ++i) {
    if (occupation[i] < 0 || occupation[i] >= cutoffs_[i]) {
      throw ValidationError("occupation " + std::to_string(occupation[i]) + " outside cutoff " + std::to_string(cutoffs_[i]));
    }
    idx += occupation[i] * strides_[i];
  }
  return idx;
}

std::vector<int> FockSpace::occupation(std::int64_t index) const {
  if (index < 0 || index >= dimension_) throw ValidationError("basis index out of range");
  std::vector<int> occ(cutoffs_.size());
  for (std::size_t i = 0; i < cutoffs_.size(); ++i) {
    occ[i] = static_cast<int>(index / strides_[i]);
    index %= strides_[i];
  }
  return occ;
}

FockSpace build_space(int modes, std::vector<int> cutoffs) { return FockSpace(modes, std::move(cutoffs)); }

FockState FockState::basis(const FockSpace& space, std::span<const int> occupation) {
  FockState s{space, ComplexVector::Zero(space.dimension())};
  s.amplitudes(space.index(occupation)) = 1.0;
  return s;
}

std::vector<Triplet> SparseOperator::triplets() const {
  std::vector<Triplet> out;
  for (Eigen::Index r = 0; r < matrix_.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(matrix_, r); it; ++it) {
      if (it.value() != Complex{0.0, 0.0}) out.push_back({it.row(), it.col(), it.value()});
    }
  }
  return out;
}

double SparseOperator::hermiticity_residual() const {
  const SparseMatrix adj = matrix_.adjoint();
  const SparseMatrix diff = matrix_ - adj;
  double worst = 0.0;
  for (Eigen::Index r = 0; r < diff.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(diff, r); it; ++it) worst = std::max(worst, std::abs(it.value()));
  }
  return worst;
}

SparseOperator build_quadratic(const GeneralizedBoson& boson, const ComplexMatrix& j, const FockSpace& space) {
  const int m = space.modes();
  if (j.rows() != m || j.cols() != m) throw DimensionError("coupling matrix must be M x M");
  if ((j - j.adjoint()).cwiseAbs().maxCoeff() > 1e-10) throw ValidationError("coupling matrix must be Hermitian");
  const int max_cut = *std::max_element(space.cutoffs().begin(), space.cutoffs().end());
  if (!boson.self_adjoint_ladder(max_cut)) {
    throw DomainError("species " + boson.name() + " has complex or negative hop weights; b^dagger is not the adjoint of b");
  }

  // Per level: raise(n) = sqrt(w(n)), lower(n) = sqrt(w(n-1)), number-like diagonal w(n-1).
  std::vector<double> raise(static_cast<std::size_t>(max_cut), 0.0);
  std::vector<double> lower(static_cast<std::size_t>(max_cut), 0.0);
  for (int n = 0; n < max_cut; ++n) {
    if (boson.local_dim() && n >= *boson.local_dim()) break;
    const LadderElements el = ladder_elements(boson, n);
    raise[static_cast<std::size_t>(n)] = el.raise.real();
    lower[static_cast<std::size_t>(n)] = el.lower.real();
  }

  std::vector<Eigen::Triplet<Complex>> entries;
  std::vector<int> occ(static_cast<std::size_t>(m));
  for (std::int64_t s = 0; s < space.dimension(); ++s) {
    std::int64_t rest = s;
    for (int i = 0; i < m; ++i) {
      occ[static_cast<std::size_t>(i)] = static_cast<int>(rest / space.stride(i));
      rest %= space.stride(i);
    }
    Complex diag{0.0, 0.0};
    for (int i = 0; i < m; ++i) {
      const int ni = occ[static_cast<std::size_t>(i)];
      if (j(i, i) != Complex{0.0, 0.0} && ni > 0) {
        diag += j(i, i) * lower[static_cast<std::size_t>(ni)] * raise[static_cast<std::size_t>(ni - 1)];
      }
    }
    if (diag != Complex{0.0, 0.0}) entries.emplace_back(s, s, diag);
    for (int src = 0; src < m; ++src) {
      const int ns = occ[static_cast<std::size_t>(src)];
      if (ns == 0) continue;
      for (int dst = 0; dst < m; ++dst) {
        if (dst == src || j(dst, src) == Complex{0.0, 0.0}) continue;
        const int nd = occ[static_cast<std::size_t>(dst)];
        if (nd + 1 >= space.cutoffs()[static_cast<std::size_t>(dst)]) continue;
        const double amp = raise[static_cast<std::size_t>(nd)] * lower[static_cast<std::size_t>(ns)];
        if (amp == 0.0) continue;
        entries.emplace_back(s + space.stride(dst) - space.stride(src), s, j(dst, src) * amp);
      }
    }
  }
  SparseMatrix h(space.dimension(), space.dimension());
  h.setFromTriplets(entries.begin(), entries.end());
  h.makeCompressed();
  return SparseOperator(std::move(h));
}

SparseOperator number_operator(const FockSpace& space) {
  std::vector<Eigen::Triplet<Complex>> entries;
  for (std::int64_t s = 0; s < space.dimension(); ++s) {
    const auto occ = space.occupation(s);
    const int total = std::accumulate(occ.begin(), occ.end(), 0);
    if (total != 0) entries.emplace_back(s, s, Complex{static_cast<double>(total), 0.0});
  }
  SparseMatrix n(space.dimension(), space.dimension());
  n.setFromTriplets(entries.begin(), entries.end());
  return SparseOperator(std::move(n));
}

ComplexMatrix bs_coupling_matrix(const ModeUnitary& r) {
  const int m = r.dim();
  ComplexMatrix j = ComplexMatrix::Zero(2 * m, 2 * m);
  j.bottomLeftCorner(m, m) = r.matrix();
  j.topRightCorner(m, m) = r.matrix().adjoint();
  return j;
}

SparseOperator build_bs_hamiltonian(const GeneralizedBoson& boson, const ModeUnitary& r, const FockSpace& space) {
  if (space.modes() != 2 * r.dim()) throw DimensionError("mode-swapping Hamiltonian needs a 2M-mode space");
  return build_quadratic(boson, bs_coupling_matrix(r), space);
}

FockState evolve(const FockState& state, const SparseOperator& h, double t, double tol) {
  if (h.dimension() != state.space.dimension()) throw DimensionError("operator and state dimensions differ");
  if (t == 0.0) return state;
  const SparseMatrix& mat = h.matrix();

  // Gershgorin bounds for the (Hermitian) spectrum.
  double lo = 0.0;
  double hi = 0.0;
  bool first = true;
  for (Eigen::Index r = 0; r < mat.outerSize(); ++r) {
    double centre = 0.0;
    double radius = 0.0;
    for (SparseMatrix::InnerIterator it(mat, r); it; ++it) {
      if (it.col() == r) {
        centre = it.value().real();
      } else {
        radius += std::abs(it.value());
      }
    }
    if (first) {
      lo = centre - radius;
      hi = centre + radius;
      first = false;
    } else {
      lo = std::min(lo, centre - radius);
      hi = std::max(hi, centre + radius);
    }
  }
  if (mat.outerSize() > 0 && mat.nonZeros() < mat.rows()) {
    // Rows without stored entries contribute eigenvalue 0.
    lo = std::min(lo, 0.0);
    hi = std::max(hi, 0.0);
  }
  const double shift = 0.5 * (hi + lo);
  const double half_width = 0.5 * (hi - lo);
  const Complex global_phase = std::exp(Complex{0.0, -shift * t});

  FockState out{state.space, ComplexVector()};
  if (half_width < 1e-300) {
    out.amplitudes = global_phase * state.amplitudes;
    return out;
  }

  // exp(-i H t) = e^{-i shift t} [J_0(x) + 2 sum_k (-i)^k J_k(x) T_k(Hs)], Hs = (H - shift)/half_width.
  const double x = half_width * std::abs(t);
  const double sgn = t > 0 ? 1.0 : -1.0;
  auto apply_scaled = [&](const ComplexVector& v) -> ComplexVector { return (mat * v - shift * v) / half_width; };

  ComplexVector prev = state.amplitudes;
  ComplexVector curr = apply_scaled(prev);
  ComplexVector acc = std::cyl_bessel_j(0.0, x) * prev;
  const Complex minus_i{0.0, -sgn};
  Complex phase = minus_i;
  const int max_terms = static_cast<int>(x) + 10000;
  int small_run = 0;
  for (int k = 1; k < max_terms; ++k) {
    const double bessel = std::cyl_bessel_j(static_cast<double>(k), x);
    acc += (2.0 * bessel) * phase * curr;
    if (k > x && std::abs(bessel) < 1e-3 * tol) {
      if (++small_run >= 2) break;
    } else {
      small_run = 0;
    }
    ComplexVector next = 2.0 * apply_scaled(curr) - prev;
    prev = std::move(curr);
    curr = std::move(next);
    phase *= minus_i;
  }
  out.amplitudes = global_phase * acc;
  const double drift = std::abs(out.norm() - state.norm());
  if (drift > std::max(1e-9, 10.0 * tol) * std::max(1.0, state.norm())) {
    throw ConvergenceError("evolution lost norm by " + std::to_string(drift));
  }
  return out;
}

FockState evolve_dense(const FockState& state, const SparseOperator& h, double t) {
  if (h.dimension() > kMaxDenseDimension) throw GuardError("dense reference limited to dimension <= 4000");
  if (h.dimension() != state.space.dimension()) throw DimensionError("operator and state dimensions differ");
  const ComplexMatrix dense = ComplexMatrix(h.matrix());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(dense);
  const ComplexMatrix& v = eig.eigenvectors();
  ComplexVector coeffs = v.adjoint() * state.amplitudes;
  for (Eigen::Index i = 0; i < coeffs.size(); ++i) coeffs(i) *= std::exp(Complex{0.0, -eig.eigenvalues()(i) * t});
  return FockState{state.space, v * coeffs};
}

FockState trotter_evolve(const GeneralizedBoson& boson, const FockState& state, std::span<const TrotterSegment> schedule,
                         double tol) {
  FockState current = state;
  for (const auto& seg : schedule) {
    if (seg.duration < 0.0) throw ValidationError("segment durations must be non-negative");
    current = evolve(current, build_quadratic(boson, seg.coupling, state.space), seg.duration, tol);
  }
  return current;
}

std::vector<TrotterSegment> first_order_schedule(std::span<const ComplexMatrix> terms, double total_time, int steps) {
  if (steps < 1) throw ValidationError("need at least one Trotter step");
  std::vector<TrotterSegment> schedule;
  const double dt = total_time / steps;
  for (int s = 0; s < steps; ++s) {
    for (const auto& term : terms) schedule.push_back({term, dt});
  }
  return schedule;
}

std::vector<int> default_cutoffs(const GeneralizedBoson& boson, int modes, int particles) {
  const int cut = boson.local_dim() ? std::min(*boson.local_dim(), particles + 1) : particles + 1;
  return std::vector<int>(static_cast<std::size_t>(modes), std::max(1, cut));
}

SwapResult peropadre_distribution(const GeneralizedBoson& boson, const ModeUnitary& r, const OccupationVector& l,
                                  std::optional<std::vector<int>> cutoffs) {
  const int m = r.dim();
  if (static_cast<int>(l.modes()) != m) throw DimensionError("input occupation needs one entry per mode");
  const int n = l.total();
  std::vector<int> cuts = cutoffs ? *cutoffs : default_cutoffs(boson, 2 * m, n);
  if (cuts.size() == 1) cuts.assign(static_cast<std::size_t>(2 * m), cuts.front());
  if (static_cast<int>(cuts.size()) != 2 * m) throw DimensionError("need one cutoff per in/out mode");
  if (boson.local_dim()) {
    for (int& c : cuts) c = std::min(c, *boson.local_dim());
  }
  const FockSpace space(2 * m, cuts);

  std::vector<int> initial(static_cast<std::size_t>(2 * m), 0);
  for (int i = 0; i < m; ++i) initial[static_cast<std::size_t>(i)] = l[static_cast<std::size_t>(i)];

  SwapResult result;
  const double hop = std::abs(boson.hop_weight(0));
  if (hop == 0.0) throw DomainError("species has no single-excitation hop");
  result.evolution_time = std::numbers::pi / (2.0 * hop);

  const FockState psi0 = FockState::basis(space, initial);
  const FockState psi = n == 0 ? psi0 : evolve(psi0, build_bs_hamiltonian(boson, r, space), result.evolution_time);
  result.norm_error = std::abs(psi.norm() - 1.0);

  std::vector<int> out(static_cast<std::size_t>(m));
  for (std::int64_t s = 0; s < space.dimension(); ++s) {
    const double p = std::norm(psi.amplitudes(s));
    std::int64_t rest = s;
    bool in_occupied = false;
    int total = 0;
    for (int i = 0; i < 2 * m; ++i) {
      const int occ = static_cast<int>(rest / space.stride(i));
      rest %= space.stride(i);
      total += occ;
      if (i < m) {
        in_occupied = in_occupied || occ > 0;
      } else {
        out[static_cast<std::size_t>(i - m)] = occ;
      }
    }
    // The Hamiltonian conserves number, so other sectors stay exactly empty.
    if (total != n) continue;
    if (in_occupied) result.leakage += p;
    result.distribution.entries[OccupationVector(out)] += p;
    result.distribution.total_mass += p;
  }
  result.distribution.normalized = std::abs(result.distribution.total_mass - 1.0) < 1e-9;
  return result;
}

std::uint64_t trial_seed(std::uint64_t base, int modes, int trial) {
  // splitmix64 finalizer over the combined key
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(modes) * 1000003ULL + static_cast<std::uint64_t>(trial) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

ScalingTable tv_scaling_experiment(const GeneralizedBoson& boson, int particles, std::span<const int> modes_list,
                                   int trials, std::uint64_t seed, int threads) {
  if (particles < 0 || particles > 3) throw GuardError("scaling experiment limited to N <= 3");
  if (trials < 1) throw ValidationError("need at least one trial");
  for (int m : modes_list) {
    if (m < particles || m < 1) throw ValidationError("each M must be >= N and >= 1");
    const auto cuts = default_cutoffs(boson, 2 * m, particles);
    FockSpace(2 * m, cuts);  // dimension guard before any work
  }
  const std::size_t jobs = modes_list.size() * static_cast<std::size_t>(trials);
  std::vector<double> tv(jobs, 0.0);
  parallel_for(jobs, threads, [&](std::size_t job) {
    const int m = modes_list[job / static_cast<std::size_t>(trials)];
    const int trial = static_cast<int>(job % static_cast<std::size_t>(trials));
    const ModeUnitary r = haar_unitary(m, trial_seed(seed, m, trial));
    std::vector<int> input(static_cast<std::size_t>(m), 0);
    for (int i = 0; i < particles; ++i) input[static_cast<std::size_t>(i)] = 1;
    const OccupationVector l(input);
    const SwapResult swap = peropadre_distribution(boson, r, l);
    const Distribution ideal = full_distribution(GeneralizedBoson::standard(), r, l, NormalizationPolicy::Raw);
    tv[job] = total_variation(swap.distribution, ideal);
  });

  ScalingTable table;
  for (std::size_t mi = 0; mi < modes_list.size(); ++mi) {
    double sum = 0.0;
    for (int t = 0; t < trials; ++t) sum += tv[mi * static_cast<std::size_t>(trials) + static_cast<std::size_t>(t)];
    const double mean = sum / trials;
    double var = 0.0;
    for (int t = 0; t < trials; ++t) {
      const double dlt = tv[mi * static_cast<std::size_t>(trials) + static_cast<std::size_t>(t)] - mean;
      var += dlt * dlt;
    }
    const double stderr_tv = trials > 1 ? std::sqrt(var / (trials - 1) / trials) : 0.0;
    table.modes.push_back(modes_list[mi]);
    table.mean_tv.push_back(mean);
    table.stderr_tv.push_back(stderr_tv);
  }

  // log-log least squares; TV at roundoff level carries no slope information
  constexpr double kFitFloor = 1e-12;
  table.fitted_exponent = std::numeric_limits<double>::quiet_NaN();
  std::size_t pts = 0;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  bool usable = table.modes.size() >= 2;
  for (std::size_t i = 0; i < table.modes.size() && usable; ++i) {
    if (!(table.mean_tv[i] > kFitFloor)) {
      usable = false;
      break;
    }
    const double lx = std::log(static_cast<double>(table.modes[i]));
    const double ly = std::log(table.mean_tv[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++pts;
  }
  if (usable && pts >= 2) {
    const double denom = pts * sxx - sx * sx;
    if (denom > 0.0) table.fitted_exponent = (pts * sxy - sx * sy) / denom;
  }
  return table;
}

ComplexMatrix cqed_coupling(std::span<const Complex> g, double delta, double chi) {
  if (delta == 0.0) throw DomainError("cqed_coupling requires a nonzero detuning");
  const auto m = static_cast<Eigen::Index>(g.size());
  ComplexMatrix j(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) {
      j(a, b) = g[static_cast<std::size_t>(a)] * std::conj(g[static_cast<std::size_t>(b)]) / delta;
    }
    j(a, a) -= chi;
  }
  return j;
}

Eigen::MatrixXd ion_superspin_couplings(double j0, double zeta, int ions_per_superspin, int superspins,
                                        const Eigen::MatrixXd& dt) {
  if (superspins < 2) throw ValidationError("need at least two superspins");
  if (ions_per_superspin < 1) throw ValidationError("need at least one ion per superspin");
  if (zeta < 0.0 || zeta >= 3.0) throw ValidationError("zeta must lie in [0, 3)");
  if (dt.rows() != superspins || dt.cols() != superspins) throw DimensionError("dt must be Ns x Ns");
  if ((dt.array() < 0.0).any()) throw ValidationError("segment times must be non-negative");

  const int n = ions_per_superspin;
  double denom = 0.0;
  for (int a = 0; a < superspins; ++a) {
    for (int b = a + 1; b < superspins; ++b) {
      if (dt(a, b) == 0.0) continue;
      double weight = 0.0;
      for (int ia = 0; ia < n; ++ia) {
        for (int ib = 0; ib < n; ++ib) {
          const double dist = std::abs((b * n + ib) - (a * n + ia));
          weight += std::pow(dist, zeta);
        }
      }
      denom += dt(a, b) * weight / (static_cast<double>(n) * n);
    }
  }
  if (denom == 0.0) throw DomainError("all segment times are zero");

  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(superspins, superspins);
  for (int a = 0; a < superspins; ++a) {
    for (int b = a + 1; b < superspins; ++b) {
      j(a, b) = j(b, a) = j0 * n * dt(a, b) / denom;
    }
  }
  return j;
}

double ion_superspin_coupling(double j0, double zeta, int ions_per_superspin, int superspins, const Eigen::MatrixXd& dt) {
  return ion_superspin_couplings(j0, zeta, ions_per_superspin, superspins, dt).maxCoeff();
}

}  // namespace gboson
