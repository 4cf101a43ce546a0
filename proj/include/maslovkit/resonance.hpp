#pragma once

#include "maslovkit/exact.hpp"
#include "maslovkit/index.hpp"
#include "maslovkit/iteration.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace maslovkit {

// ---- critical type numbers ----

struct TypeNumberViolation {
  std::string rule;  // "support", "negative", "endpoint", "i", "ii", "iii", "iv"
  std::string detail;
};

/// Structural constraints on k_0..k_{ν−1} of one iterate.
std::vector<TypeNumberViolation> validate_type_numbers(const std::vector<int>& k, int nullity);

/// Type numbers of one iterate together with its index and nullity.
struct IterateTypeNumbers {
  long long index = 0;
  int nullity = 1;
  std::vector<int> k;
};

/// k of a non-degenerate iterate: k_0 = 1 iff (−1)^{i(zᵐ) − i(z)} = 1.
std::vector<int> nondegenerate_type_numbers(long long i_m, long long i_1);

// ---- average Euler characteristics ----

/// Non-degenerate orbit: (−1)^{i} if i(z²) − i(z) is even, (−1)^{i}/2 otherwise.
Rational euler_hat(long long i_y, bool jump_even);
/// (1/K) Σ_{m ≤ K} Σ_l (−1)^{i(zᵐ)+l} k_l(zᵐ), entries m = 1..K.
/// Throws InvalidTypeNumbers.
Rational euler_hat(const std::vector<IterateTypeNumbers>& one_period);

/// Non-degenerate symmetric orbit: (−1)^{ī}.
Rational euler_hat_symmetric(long long ibar);
/// (2/K̄) Σ_{m ≤ K̄/2} Σ_l (−1)^{ī(y^{2m−1})+l} k̄_l(y^{2m−1}); entries are
/// the odd iterates 1, 3, ..., K̄ − 1. Throws InvalidTypeNumbers.
Rational euler_hat_symmetric(const std::vector<IterateTypeNumbers>& odd_iterates);

// ---- identities ----

/// Mean index known exactly or as a bracket.
struct MeanValue {
  std::optional<QuadNumber> exact;
  RationalInterval bracket;

  static MeanValue of(const QuadNumber& q) { return {q, {}}; }
  static MeanValue of(const RationalInterval& r) { return {std::nullopt, r}; }
  int sign() const;  // throws SignAmbiguous when a bracket contains 0
  double lo() const;
  double hi() const;
};

struct OrbitInvariants {
  std::string id;
  MeanValue ihat;
  std::optional<Rational> chi_hat;  // unknown values are solved for
  bool nondegenerate = true;        // every iterate non-degenerate
  bool symmetric = false;
  std::optional<MeanValue> ibar_hat;  // defaults to ihat/2
  std::optional<Rational> chibar_hat;
  bool symmetric_nondegenerate = true;  // ν̄ = 1 on every odd iterate
};

enum class IdentityId { PeriodicPositive, PeriodicNegative, SymmetricPositive, SymmetricNegative };
std::string to_string(IdentityId id);

struct IdentityTerm {
  std::string orbit;
  std::string value;  // exact rendering or interval
};

struct ForcedValue {
  std::string orbit;
  QuadNumber value;
  bool admissible = false;
};

struct IdentityReport {
  IdentityId id = IdentityId::PeriodicPositive;
  bool exact = true;
  QuadNumber exact_sum;                 // when exact
  double lo = 0.0, hi = 0.0;            // interval of the sum
  Rational target{0};
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::vector<IdentityTerm> terms;
  std::optional<ForcedValue> forced;
  bool completeness_caveat = true;  // the identities range over all prime orbits
};

struct IdentityTolerances {
  double periodic = 0.125;
  double symmetric = 0.25;
};

/// Σ χ̂/î over î > 0 (target 1/2) and î < 0 (target 0), and the symmetric
/// analogues (targets 1 and 0) when any orbit is symmetric.
std::vector<IdentityReport> identity_sums(const std::vector<OrbitInvariants>& orbits,
                                          const IdentityTolerances& tol = {});

// ---- Morse series ----

struct MorseOrbit {
  std::string id;
  std::function<long long(long long)> index;  // m ↦ i(yᵐ) (or ī(y^m) for odd m)
  std::function<std::vector<int>(long long)> type_numbers;
  double mean = 0.0;  // î (or ī̂)
  int n = 2;
};

/// Non-degenerate orbit from a formula; degenerate iterates need supplied
/// data, K-periodic in m: supplied[(m − 1) mod K] for m with ν(yᵐ) > 1.
MorseOrbit morse_orbit(const std::string& id, const IterationFormula& f,
                       const std::map<long long, std::vector<int>>& degenerate_k = {});
/// Symmetric variant over odd iterates, with ī̂ = î/2; non-degenerate
/// odd iterates carry k̄_0 = 1.
MorseOrbit symmetric_morse_orbit(const std::string& id, std::function<long long(long long)> ibar, double ibar_hat,
                                 int n = 2);

struct MorseSeries {
  int window = 0;                       // coefficients for h ∈ [−W, W]
  std::map<int, long long> coefficients;  // only non-zero entries
  bool symmetric = false;
  long long lowest = 0;  // smallest index + l over all contributions
  bool any = false;
  long long at(int h) const;
};

/// w_h = Σ_j Σ_l #{m : index_j(m) + l = h} k_l over in-window iterates.
/// Throws UnboundedContribution for î = 0 with an in-window iterate.
MorseSeries morse_series(const std::vector<MorseOrbit>& orbits, int window, bool symmetric = false);

struct MorseVerdict {
  bool pass = true;
  std::map<int, long long> u;  // U(t) coefficients
  std::vector<int> negative_u;
  std::optional<int> lowest_negative;  // p < 0 with m_p > 0 and m_q = 0 below
  bool monotone_violation = false;     // m_{p+1} < m_p
  bool vacuous = false;                // all-zero table
  std::string note;
};

/// Formal division (M(t) − 1/(1 − t²)) / (1 + t) from the bottom of the
/// window and the m_{p+1} ≥ m_p test. Throws TruncationTooTight when
/// W < 4n or some contribution lies below −W.
MorseVerdict morse_inequality_check(const MorseSeries& series, int n = 2);

}  // namespace maslovkit
