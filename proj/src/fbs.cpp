#include "gboson/fbs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "gboson/errors.hpp"
#include "gboson/parallel.hpp"

namespace gboson {

int OccupationVector::total() const { return std::accumulate(counts.begin(), counts.end(), 0); }

double Distribution::probability(const OccupationVector& k) const {
  const auto it = entries.find(k);
  return it == entries.end() ? 0.0 : it->second;
}

namespace {

void validate_pair(const GeneralizedBoson& boson, const ModeUnitary& u, const OccupationVector& l,
                   const OccupationVector& k) {
  const auto m = static_cast<std::size_t>(u.dim());
  if (l.modes() != m || k.modes() != m) {
    throw DimensionError("occupation vectors need " + std::to_string(m) + " entries");
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (l[i] < 0 || k[i] < 0) throw ValidationError("occupations must be non-negative");
  }
  if (l.total() != k.total()) throw ValidationError("particle-number mismatch between input and output");
  if (const auto d = boson.local_dim()) {
    for (std::size_t i = 0; i < m; ++i) {
      if (l[i] >= *d) {
        throw ValidationError("input occupation " + std::to_string(l[i]) + " exceeds local dimension " +
                              std::to_string(*d));
      }
    }
  }
}

bool vanishes(const GeneralizedBoson& boson, const OccupationVector& k) {
  const auto d = boson.local_dim();
  return d && std::any_of(k.counts.begin(), k.counts.end(), [&](int ki) { return ki >= *d; });
}

}  // namespace

double outcome_probability(const GeneralizedBoson& boson, const ModeUnitary& u, const OccupationVector& l,
                           const OccupationVector& k) {
  validate_pair(boson, u, l, k);
  if (vanishes(boson, k)) return 0.0;

  double log_prefactor = 0.0;
  for (std::size_t i = 0; i < k.modes(); ++i) {
    log_prefactor += log_abs_f(boson, k[i]) - log_abs_f(boson, l[i]) - std::lgamma(k[i] + 1.0);
  }
  const Complex perm = permanent_fast(submatrix_repeat(u, k.counts, l.counts));
  return std::exp(2.0 * log_prefactor) * std::norm(perm);
}

Complex amplitude_oracle(const GeneralizedBoson& boson, const ModeUnitary& u, const OccupationVector& l,
                         const OccupationVector& k) {
  validate_pair(boson, u, l, k);
  const int m = u.dim();
  const int n = l.total();
  if (n > kOracleMaxParticles || m > kOracleMaxModes) throw GuardError("amplitude_oracle limited to N <= 8, M <= 6");
  if (vanishes(boson, k)) return {0.0, 0.0};

  // Dense coefficient array over exponent vectors e, flat index sum_j e_j (n+1)^j.
  const std::size_t base = static_cast<std::size_t>(n) + 1;
  std::vector<std::size_t> stride(static_cast<std::size_t>(m));
  std::size_t size = 1;
  for (int j = 0; j < m; ++j) {
    stride[static_cast<std::size_t>(j)] = size;
    size *= base;
  }
  std::vector<Complex> poly(size, Complex{0.0, 0.0});
  std::vector<Complex> next(size);
  poly[0] = 1.0;
  std::vector<int> exps(static_cast<std::size_t>(m));

  for (int i = 0; i < m; ++i) {
    for (int rep = 0; rep < l[static_cast<std::size_t>(i)]; ++rep) {
      std::fill(next.begin(), next.end(), Complex{0.0, 0.0});
      for (std::size_t idx = 0; idx < size; ++idx) {
        if (poly[idx] == Complex{0.0, 0.0}) continue;
        std::size_t rest = idx;
        for (int j = 0; j < m; ++j) {
          exps[static_cast<std::size_t>(j)] = static_cast<int>(rest % base);
          rest /= base;
        }
        // Multiply by the linear form sum_j U_ji x_j.
        for (int j = 0; j < m; ++j) {
          if (exps[static_cast<std::size_t>(j)] + 1 >= static_cast<int>(base)) continue;
          next[idx + stride[static_cast<std::size_t>(j)]] += poly[idx] * u(j, i);
        }
      }
      std::swap(poly, next);
    }
  }

  std::size_t target = 0;
  for (int j = 0; j < m; ++j) target += static_cast<std::size_t>(k[static_cast<std::size_t>(j)]) * stride[static_cast<std::size_t>(j)];
  Complex amp = poly[target];
  for (int j = 0; j < m; ++j) {
    amp *= f_eval(boson, k[static_cast<std::size_t>(j)]);
    amp /= f_eval(boson, l[static_cast<std::size_t>(j)]);
  }
  return amp;
}

std::vector<OccupationVector> enumerate_outcomes(int modes, int n, std::optional<int> local_dim) {
  std::vector<OccupationVector> out;
  if (modes < 1 || n < 0) return out;
  const int cap = local_dim ? *local_dim - 1 : n;
  std::vector<int> current(static_cast<std::size_t>(modes), 0);
  auto rec = [&](auto&& self, int mode, int remaining) -> void {
    if (mode == modes - 1) {
      if (remaining <= cap) {
        current[static_cast<std::size_t>(mode)] = remaining;
        out.emplace_back(current);
      }
      return;
    }
    for (int v = 0; v <= std::min(remaining, cap); ++v) {
      current[static_cast<std::size_t>(mode)] = v;
      self(self, mode + 1, remaining - v);
    }
  };
  rec(rec, 0, n);
  return out;
}

Distribution full_distribution(const GeneralizedBoson& boson, const ModeUnitary& u, const OccupationVector& l,
                               NormalizationPolicy policy, int threads) {
  const auto outcomes = enumerate_outcomes(u.dim(), l.total());
  std::vector<double> probs(outcomes.size());
  parallel_for(outcomes.size(), threads, [&](std::size_t i) { probs[i] = outcome_probability(boson, u, l, outcomes[i]); });

  Distribution dist;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    dist.entries.emplace(outcomes[i], probs[i]);
    dist.total_mass += probs[i];
  }
  if (policy == NormalizationPolicy::Renormalize) {
    if (dist.total_mass < 1e-12) {
      throw DomainError("cannot renormalize: total mass " + std::to_string(dist.total_mass) + " is degenerate");
    }
    for (auto& [outcome, p] : dist.entries) p /= dist.total_mass;
    dist.normalized = true;
  } else {
    dist.normalized = std::abs(dist.total_mass - 1.0) < 1e-9;
  }
  return dist;
}

void require_normalized(const Distribution& dist, const char* what) {
  double sum = 0.0;
  for (const auto& [outcome, p] : dist.entries) {
    if (p < 0.0) throw ValidationError(std::string(what) + ": negative probability");
    sum += p;
  }
  if (!dist.normalized || std::abs(sum - 1.0) > 1e-9) {
    throw ValidationError(std::string(what) + " requires a normalized distribution");
  }
}

std::vector<OccupationVector> sample(const Distribution& dist, std::size_t count, std::uint64_t seed) {
  require_normalized(dist, "sample");
  std::vector<const OccupationVector*> outcomes;
  std::vector<double> cdf;
  double acc = 0.0;
  for (const auto& [outcome, p] : dist.entries) {
    if (p <= 0.0) continue;
    acc += p;
    outcomes.push_back(&outcome);
    cdf.push_back(acc);
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<OccupationVector> draws;
  draws.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    const double x = uniform(rng) * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), x);
    if (it == cdf.end()) --it;
    draws.push_back(*outcomes[static_cast<std::size_t>(it - cdf.begin())]);
  }
  return draws;
}

double total_variation(const Distribution& p, const Distribution& q) {
  require_normalized(p, "total_variation");
  require_normalized(q, "total_variation");
  double sum = 0.0;
  for (const auto& [outcome, pv] : p.entries) sum += std::abs(pv - q.probability(outcome));
  for (const auto& [outcome, qv] : q.entries) {
    if (!p.entries.contains(outcome)) sum += std::abs(qv);
  }
  return 0.5 * sum;
}

}  // namespace gboson
