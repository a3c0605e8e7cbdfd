#pragma once

// Generalized boson species.
//
// A species is fixed by its bosonic factor f(n), defined through
// (b^dagger)^n |0> = f(n) |n>, or equivalently by the diagonal commutator
// F(n) = <n|[b, b^dagger]|n>. Internally every species is stored through the
// hop weights w(n) = f(n+1)^2 / f(n)^2, from which both f and F follow:
//
//   f(n) = prod_{k<n} sqrt(w(k))      (principal branch per factor)
//   F(n) = w(n) - w(n-1)              (w(-1) = 0)
//
// A species with a finite local dimension d has w(d-1) = 0 and f(n) = 0 for n >= d.

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gboson {

using Complex = std::complex<double>;

enum class BosonKind { Standard, BosonPair, SpinS, QBoson, MParaboson, CustomF, CustomCommutator };

class GeneralizedBoson {
 public:
  static GeneralizedBoson standard();
  static GeneralizedBoson boson_pair();
  /// Spin-S boson with 2S = two_s (two_s >= 1).
  static GeneralizedBoson spin_s(int two_s);
  static GeneralizedBoson q_boson(Complex q);
  static GeneralizedBoson m_paraboson(int m);
  /// Species given by its bosonic factor table f(0), f(1), ...; f(0) must be 1.
  static GeneralizedBoson custom_f(std::vector<Complex> f_table);
  /// Species given by its commutator table F(0), F(1), ...
  static GeneralizedBoson custom_commutator(std::vector<Complex> F_table);

  BosonKind kind() const { return kind_; }
  int two_s() const { return two_s_; }
  Complex q() const { return q_; }
  int m() const { return m_; }
  const std::vector<Complex>& table() const { return table_; }

  /// Smallest n with f(n) = 0, if any.
  std::optional<int> local_dim() const { return local_dim_; }

  /// Largest n for which f(n) is defined (custom tables are finite).
  int max_level() const;

  /// w(n) = f(n+1)^2 / f(n)^2. Exactly zero once n + 1 reaches local_dim.
  Complex hop_weight(int n) const;

  /// True when every hop weight is real and non-negative, i.e. b^dagger is the
  /// adjoint of b and quadratic Hamiltonians built from it are Hermitian.
  bool self_adjoint_ladder(int n_max) const;

  /// Set when a custom commutator table produced a negative real partial sum.
  bool branch_warning() const { return branch_warning_; }

  std::string name() const;

 private:
  GeneralizedBoson() = default;

  BosonKind kind_ = BosonKind::Standard;
  int two_s_ = 0;
  Complex q_{1.0, 0.0};
  int m_ = 0;
  std::vector<Complex> table_;
  // Hop weights derived from a custom table.
  std::vector<Complex> weights_;
  std::optional<int> local_dim_;
  bool branch_warning_ = false;
};

/// [n]_q = (q^n - q^-n) / (q - q^-1), evaluated as sum_{k<n} q^{n-1-2k} so that q = +-1 needs no limit.
Complex q_number(Complex q, int n);

/// Bosonic factor f(n).
Complex f_eval(const GeneralizedBoson& boson, int n);

/// log |f(n)|; -infinity when f(n) = 0.
double log_abs_f(const GeneralizedBoson& boson, int n);

/// Diagonal commutator F(n) = f(n+1)^2/f(n)^2 - f(n)^2/f(n-1)^2.
/// Throws DomainError for n >= local_dim.
Complex F_from_f(const GeneralizedBoson& boson, int n);

struct FactorFromCommutator {
  Complex value;
  /// First n where the partial sum vanished (f is truncated from there on).
  std::optional<int> local_dim;
  /// A partial sum was negative real, so f picks up an imaginary branch.
  bool branch_warning = false;
};

/// Reconstructs f(n) from F(0..n-1) using f(0) = 1, f(1)^2 = F(0) and
/// f(k+1)^2/f(k)^2 = F(0) + F(1) + ... + F(k).
FactorFromCommutator f_from_F(std::span<const Complex> F_values, int n);

struct LadderElements {
  Complex lower;  ///< <n-1| b |n>
  Complex raise;  ///< <n+1| b^dagger |n>
};

LadderElements ladder_elements(const GeneralizedBoson& boson, int n);

/// Closed forms as listed in the reference catalog; used only to detect inconsistencies.
namespace catalog_table {
std::optional<Complex> reference_F(const GeneralizedBoson& boson, int n);
std::optional<Complex> reference_f(const GeneralizedBoson& boson, int n);
}  // namespace catalog_table

struct RoundtripRow {
  int n = 0;
  Complex f;
  Complex F;
  Complex f_reconstructed;
  double roundtrip_residual = 0.0;
  std::optional<Complex> table_F;
  std::optional<Complex> table_f;
  std::optional<double> table_residual;
};

struct RoundtripReport {
  std::string species;
  int n_max = 0;
  std::vector<RoundtripRow> rows;
  double max_roundtrip_residual = 0.0;
  double max_table_residual = 0.0;
  bool roundtrip_ok = true;
  bool table_consistent = true;
};

/// Checks f_from_F(F_from_f(.)) == f_eval for n <= n_max (clamped below local_dim),
/// and compares against the reference catalog columns. Never throws on mismatch.
RoundtripReport roundtrip_check(const GeneralizedBoson& boson, int n_max);

}  // namespace gboson
