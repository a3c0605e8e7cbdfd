#include "gboson/algebra.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "gboson/errors.hpp"

namespace gboson {
namespace {

constexpr double kZeroTol = 1e-12;

// q-boson truncation happens only on the unit circle, when [n]_q = 0 for a root of unity.
std::optional<int> q_boson_local_dim(Complex q) {
  if (std::abs(std::abs(q) - 1.0) > 1e-12) return std::nullopt;
  for (int n = 2; n <= 10000; ++n) {
    if (std::abs(q_number(q, n)) < 1e-10) return n;
  }
  return std::nullopt;
}

Complex principal_sqrt(Complex w) { return std::sqrt(w); }

}  // namespace

Complex q_number(Complex q, int n) {
  if (n <= 0) return {0.0, 0.0};
  Complex term{1.0, 0.0};
  for (int k = 0; k < n - 1; ++k) term *= q;
  const Complex step = 1.0 / (q * q);
  Complex sum{0.0, 0.0};
  for (int k = 0; k < n; ++k) {
    sum += term;
    term *= step;
  }
  return sum;
}

GeneralizedBoson GeneralizedBoson::standard() { return GeneralizedBoson{}; }

GeneralizedBoson GeneralizedBoson::boson_pair() {
  GeneralizedBoson b;
  b.kind_ = BosonKind::BosonPair;
  return b;
}

GeneralizedBoson GeneralizedBoson::spin_s(int two_s) {
  if (two_s < 1) throw ValidationError("spin_s requires 2S >= 1");
  GeneralizedBoson b;
  b.kind_ = BosonKind::SpinS;
  b.two_s_ = two_s;
  b.local_dim_ = two_s + 1;
  return b;
}

GeneralizedBoson GeneralizedBoson::q_boson(Complex q) {
  if (q == Complex{0.0, 0.0}) throw ValidationError("q_boson requires q != 0");
  if (!std::isfinite(q.real()) || !std::isfinite(q.imag())) throw ValidationError("q_boson requires finite q");
  GeneralizedBoson b;
  b.kind_ = BosonKind::QBoson;
  b.q_ = q;
  b.local_dim_ = q_boson_local_dim(q);
  return b;
}

GeneralizedBoson GeneralizedBoson::m_paraboson(int m) {
  if (m < 0) throw ValidationError("m_paraboson requires m >= 0");
  GeneralizedBoson b;
  b.kind_ = BosonKind::MParaboson;
  b.m_ = m;
  return b;
}

GeneralizedBoson GeneralizedBoson::custom_f(std::vector<Complex> f_table) {
  if (f_table.empty()) throw ValidationError("custom_f table is empty");
  if (std::abs(f_table[0] - Complex{1.0, 0.0}) > kZeroTol) throw ValidationError("custom_f requires f(0) = 1");
  GeneralizedBoson b;
  b.kind_ = BosonKind::CustomF;
  for (std::size_t n = 0; n < f_table.size(); ++n) {
    const bool zero = std::abs(f_table[n]) == 0.0;
    if (zero && !b.local_dim_) b.local_dim_ = static_cast<int>(n);
    if (!zero && b.local_dim_) throw ValidationError("custom_f table is nonzero after a zero entry");
  }
  const std::size_t last = b.local_dim_ ? static_cast<std::size_t>(*b.local_dim_) : f_table.size() - 1;
  for (std::size_t n = 0; n < last; ++n) {
    const Complex r = f_table[n + 1] / f_table[n];
    b.weights_.push_back(r * r);
  }
  b.table_ = std::move(f_table);
  return b;
}

GeneralizedBoson GeneralizedBoson::custom_commutator(std::vector<Complex> F_table) {
  if (F_table.empty()) throw ValidationError("custom_F table is empty");
  GeneralizedBoson b;
  b.kind_ = BosonKind::CustomCommutator;
  Complex partial{0.0, 0.0};
  double scale = 1.0;
  for (std::size_t n = 0; n < F_table.size(); ++n) {
    partial += F_table[n];
    scale = std::max(scale, std::abs(F_table[n]));
    if (std::abs(partial) <= kZeroTol * scale) {
      b.weights_.push_back({0.0, 0.0});
      b.local_dim_ = static_cast<int>(n) + 1;
      break;
    }
    if (std::abs(partial.imag()) <= kZeroTol * scale && partial.real() < 0.0) b.branch_warning_ = true;
    b.weights_.push_back(partial);
  }
  b.table_ = std::move(F_table);
  return b;
}

int GeneralizedBoson::max_level() const {
  if (kind_ == BosonKind::CustomF || kind_ == BosonKind::CustomCommutator) {
    if (local_dim_) return INT_MAX;
    return static_cast<int>(weights_.size());
  }
  return INT_MAX;
}

Complex GeneralizedBoson::hop_weight(int n) const {
  if (n < 0) throw DomainError("hop weight requested for negative occupation");
  if (local_dim_ && n + 1 >= *local_dim_) return {0.0, 0.0};
  const double x = n;
  switch (kind_) {
    case BosonKind::Standard:
      return {x + 1.0, 0.0};
    case BosonKind::BosonPair:
      return {(2.0 * x + 1.0) * (2.0 * x + 2.0), 0.0};
    case BosonKind::SpinS:
      return {(x + 1.0) * (two_s_ - x), 0.0};
    case BosonKind::QBoson:
      return q_number(q_, n + 1);
    case BosonKind::MParaboson:
      // Partial sum F(0) + ... + F(n) of F(i) = 1 + (2m+1)(-1)^i.
      return {x + 1.0 + (n % 2 == 0 ? 2.0 * m_ + 1.0 : 0.0), 0.0};
    case BosonKind::CustomF:
    case BosonKind::CustomCommutator:
      if (static_cast<std::size_t>(n) >= weights_.size()) {
        throw DomainError("occupation " + std::to_string(n + 1) + " lies beyond the custom species table");
      }
      return weights_[static_cast<std::size_t>(n)];
  }
  return {0.0, 0.0};
}

bool GeneralizedBoson::self_adjoint_ladder(int n_max) const {
  for (int n = 0; n < n_max; ++n) {
    if (local_dim_ && n + 1 >= *local_dim_) break;
    const Complex w = hop_weight(n);
    if (std::abs(w.imag()) > 1e-14 * std::max(1.0, std::abs(w)) || w.real() < 0.0) return false;
  }
  return true;
}

std::string GeneralizedBoson::name() const {
  std::ostringstream os;
  switch (kind_) {
    case BosonKind::Standard:
      return "standard";
    case BosonKind::BosonPair:
      return "boson_pair";
    case BosonKind::SpinS:
      os << "spin_s(2S=" << two_s_ << ")";
      return os.str();
    case BosonKind::QBoson:
      os << "q_boson(q=" << q_.real();
      if (q_.imag() != 0.0) os << (q_.imag() > 0 ? "+" : "") << q_.imag() << "i";
      os << ")";
      return os.str();
    case BosonKind::MParaboson:
      os << "m_paraboson(m=" << m_ << ")";
      return os.str();
    case BosonKind::CustomF:
      return "custom_f";
    case BosonKind::CustomCommutator:
      return "custom_F";
  }
  return "unknown";
}

double log_abs_f(const GeneralizedBoson& boson, int n) {
  if (n < 0) throw DomainError("f(n) requested for negative n");
  if (boson.local_dim() && n >= *boson.local_dim()) return -std::numeric_limits<double>::infinity();
  double log_mag = 0.0;
  for (int k = 0; k < n; ++k) log_mag += 0.5 * std::log(std::abs(boson.hop_weight(k)));
  return log_mag;
}

Complex f_eval(const GeneralizedBoson& boson, int n) {
  if (n < 0) throw DomainError("f(n) requested for negative n");
  if (boson.local_dim() && n >= *boson.local_dim()) return {0.0, 0.0};
  if (boson.kind() == BosonKind::CustomF && static_cast<std::size_t>(n) < boson.table().size()) {
    return boson.table()[static_cast<std::size_t>(n)];
  }
  // Log-magnitude plus accumulated phase keeps factorial growth from overflowing early.
  double log_mag = 0.0;
  double phase = 0.0;
  for (int k = 0; k < n; ++k) {
    const Complex r = principal_sqrt(boson.hop_weight(k));
    log_mag += std::log(std::abs(r));
    phase += std::arg(r);
  }
  if (phase == 0.0) return {std::exp(log_mag), 0.0};
  return std::polar(std::exp(log_mag), phase);
}

Complex F_from_f(const GeneralizedBoson& boson, int n) {
  if (n < 0) throw DomainError("F(n) requested for negative n");
  if (boson.local_dim() && n >= *boson.local_dim()) {
    throw DomainError("commutator undefined on truncated state n=" + std::to_string(n));
  }
  const Complex up = boson.hop_weight(n);
  const Complex down = n == 0 ? Complex{0.0, 0.0} : boson.hop_weight(n - 1);
  return up - down;
}

FactorFromCommutator f_from_F(std::span<const Complex> F_values, int n) {
  if (n < 0) throw DomainError("f(n) requested for negative n");
  if (static_cast<std::size_t>(n) > F_values.size()) {
    throw DomainError("f(" + std::to_string(n) + ") needs F(0.." + std::to_string(n - 1) + ")");
  }
  FactorFromCommutator out{{1.0, 0.0}, std::nullopt, false};
  Complex partial{0.0, 0.0};
  double scale = 1.0;
  double log_mag = 0.0;
  double phase = 0.0;
  for (int k = 0; k < n; ++k) {
    partial += F_values[static_cast<std::size_t>(k)];
    scale = std::max(scale, std::abs(F_values[static_cast<std::size_t>(k)]));
    if (std::abs(partial) <= kZeroTol * scale) {
      out.local_dim = k + 1;
      out.value = {0.0, 0.0};
      return out;
    }
    if (std::abs(partial.imag()) <= kZeroTol * scale && partial.real() < 0.0) out.branch_warning = true;
    const Complex r = principal_sqrt(partial);
    log_mag += std::log(std::abs(r));
    phase += std::arg(r);
  }
  out.value = phase == 0.0 ? Complex{std::exp(log_mag), 0.0} : std::polar(std::exp(log_mag), phase);
  return out;
}

LadderElements ladder_elements(const GeneralizedBoson& boson, int n) {
  if (n < 0) throw DomainError("ladder elements requested for negative n");
  if (boson.local_dim() && n >= *boson.local_dim()) {
    throw DomainError("ladder elements undefined on truncated state n=" + std::to_string(n));
  }
  LadderElements el{{0.0, 0.0}, {0.0, 0.0}};
  if (n > 0) el.lower = principal_sqrt(boson.hop_weight(n - 1));
  el.raise = principal_sqrt(boson.hop_weight(n));
  return el;
}

namespace catalog_table {

std::optional<Complex> reference_F(const GeneralizedBoson& boson, int n) {
  const double x = n;
  switch (boson.kind()) {
    case BosonKind::Standard:
      return Complex{1.0, 0.0};
    case BosonKind::BosonPair:
      return Complex{2.0 + 8.0 * x, 0.0};
    case BosonKind::SpinS: {
      const double two_s = boson.two_s();
      return Complex{two_s - x >= 0.0 ? x - two_s : 0.0, 0.0};
    }
    case BosonKind::QBoson:
      return q_number(boson.q(), n + 1) - q_number(boson.q(), n);
    case BosonKind::MParaboson:
      return 1.0 + (2.0 * boson.m() + 1.0) * std::exp(Complex{0.0, std::numbers::pi * x});
    default:
      return std::nullopt;
  }
}

std::optional<Complex> reference_f(const GeneralizedBoson& boson, int n) {
  switch (boson.kind()) {
    case BosonKind::Standard:
      return Complex{std::exp(0.5 * std::lgamma(n + 1.0)), 0.0};
    case BosonKind::BosonPair:
      return Complex{std::exp(0.5 * std::lgamma(2.0 * n + 1.0)), 0.0};
    case BosonKind::SpinS: {
      if (n > boson.two_s()) return Complex{0.0, 0.0};
      const double log_sq = std::lgamma(n + 1.0) + std::lgamma(boson.two_s() + 1.0) - std::lgamma(boson.two_s() - n + 1.0);
      return Complex{std::exp(0.5 * log_sq), 0.0};
    }
    case BosonKind::QBoson: {
      Complex fact{1.0, 0.0};
      for (int j = 1; j <= n; ++j) fact *= q_number(boson.q(), j);
      return std::sqrt(fact);
    }
    case BosonKind::MParaboson: {
      // Listed with a real exponential e^{2 pi k}, not an oscillating phase.
      const double m = boson.m();
      Complex prod{1.0, 0.0};
      for (int k = 1; k <= n; ++k) {
        prod *= std::sqrt(Complex{(2.0 * k + 2.0 * m + 3.0 + (2.0 * m + 1.0) * std::exp(2.0 * std::numbers::pi * k)) / 2.0, 0.0});
      }
      return prod;
    }
    default:
      return std::nullopt;
  }
}

}  // namespace catalog_table

RoundtripReport roundtrip_check(const GeneralizedBoson& boson, int n_max) {
  RoundtripReport report;
  report.species = boson.name();
  int limit = std::max(0, n_max);
  if (boson.local_dim()) limit = std::min(limit, *boson.local_dim() - 1);
  if (boson.max_level() != INT_MAX) limit = std::min(limit, boson.max_level() - 1);
  report.n_max = limit;

  std::vector<Complex> F_values;
  for (int n = 0; n <= limit; ++n) F_values.push_back(F_from_f(boson, n));

  auto rel = [](Complex a, Complex b) {
    const double denom = std::max(std::abs(a), std::abs(b));
    return denom == 0.0 ? 0.0 : std::abs(a - b) / denom;
  };

  for (int n = 0; n <= limit; ++n) {
    RoundtripRow row;
    row.n = n;
    row.f = f_eval(boson, n);
    row.F = F_values[static_cast<std::size_t>(n)];
    row.f_reconstructed = f_from_F(F_values, n).value;
    row.roundtrip_residual = rel(row.f, row.f_reconstructed);
    row.table_F = catalog_table::reference_F(boson, n);
    row.table_f = catalog_table::reference_f(boson, n);
    if (row.table_F || row.table_f) {
      double r = 0.0;
      if (row.table_F) r = std::max(r, std::abs(row.F - *row.table_F) / std::max(1.0, std::abs(*row.table_F)));
      if (row.table_f) r = std::max(r, rel(row.f, *row.table_f));
      if (std::isnan(r)) r = std::numeric_limits<double>::infinity();
      row.table_residual = r;
      report.max_table_residual = std::max(report.max_table_residual, r);
    }
    report.max_roundtrip_residual = std::max(report.max_roundtrip_residual, row.roundtrip_residual);
    report.rows.push_back(row);
  }
  report.roundtrip_ok = report.max_roundtrip_residual < 1e-9;
  report.table_consistent = report.max_table_residual < 1e-9;
  return report;
}

}  // namespace gboson
