#pragma once

#include "maslovkit/exact.hpp"
#include "maslovkit/linalg.hpp"
#include "maslovkit/orbits.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace maslovkit {

enum class NormalCase { Case1, Case2, Case3, Case4, Hyperbolic };
std::string to_string(NormalCase c);

/// γ(τ) = P⁻¹(N₁(1,1) ⋄ M)P up to conjugacy, classified by the transverse block M.
struct NormalFormSp4 {
  NormalCase kind = NormalCase::Hyperbolic;
  int b = 0;                      // Case 1 and Case 3
  double theta = 0.0;             // Case 2, in (0, π) ∪ (π, 2π)
  std::optional<Rational> theta_over_pi;  // set when θ/π is rational
  bool negative_hyperbolic = false;
  Mat transverse;                 // M, 2×2 (empty for Cases 3 and 4)
  std::optional<Mat> witness;     // P⁻¹, symplectic
  double witness_residual = 0.0;
};

struct RecognitionOptions {
  Thresholds thresholds;
  double form_tol = 1e-6;  // sign threshold for the nilpotent form, relative to ‖M‖
  int max_denominator = 1000;
  double rational_tol = 1e-9;
};

/// Throws NoUnitBlock when no N₁(1,1) factor can be isolated and
/// AmbiguousCase when eigenvalues sit inside the threshold bands.
NormalFormSp4 recognize_normal_form(const Mat& gamma_tau, const RecognitionOptions& opts = {});

/// Best rational approximation p/q of x with q ≤ max_den, if within tol.
std::optional<Rational> rational_approximation(double x, int max_den, double tol);

/// Mean index î as (rational part) + (θ/π); θ/π is carried exactly when
/// known, as a float otherwise.
struct MeanIndex {
  QuadNumber exact;      // valid when is_exact
  bool is_exact = true;
  double approx = 0.0;
  double value() const { return is_exact ? exact.to_double() : approx; }
};

/// Closed-form i(yᵐ), ν(yᵐ) of an Sp(4) orbit in Morse normalisation.
class IterationFormula {
 public:
  /// i_morse = i(y). For Case 2, θ/2π may be given exactly (rational or
  /// quadratic irrational); otherwise the float θ of nf is used.
  IterationFormula(NormalFormSp4 nf, int i_morse, std::optional<QuadNumber> rotation_exact = std::nullopt);

  static IterationFormula hyperbolic(int i_morse);
  static IterationFormula case1(int b, int i_morse);
  static IterationFormula case2(const QuadNumber& theta_over_2pi, int i_morse);
  static IterationFormula case3(int b, int i_morse);
  static IterationFormula case4(int i_morse);

  const NormalFormSp4& normal_form() const { return nf_; }
  NormalCase kind() const { return nf_.kind; }
  int i1() const { return i_; }
  int n() const { return 2; }

  long long index(long long m) const;  // i(yᵐ)
  int nullity(long long m) const;      // ν(yᵐ)
  long long maslov(long long m) const { return index(m) + n(); }  // i(y, m)
  MeanIndex mean() const;
  /// Minimal period of the degeneracy lattice; 0 stands for ∞.
  long long degeneracy_period() const;
  /// S⁺(1) of γ(τ): 1 from N₁(1,1), plus the transverse contribution.
  int splitting_plus() const;

 private:
  long long ceil_rotation(long long m) const;  // E(mθ/2π)

  NormalFormSp4 nf_;
  int i_;
  std::optional<QuadNumber> rot_;
};

/// Odd-iterate symmetric indices ī(yᵐ) = i(ψ^{2m}) − i(ψᵐ) (Bott difference),
/// given m ↦ i(ψᵐ) for the half path ψ.
struct SymmetricIterate {
  int m = 1;
  long long index = 0;
};
std::vector<SymmetricIterate> symmetric_iteration(const std::function<long long(long long)>& half_index, int max_m);

/// i(ψᵐ) = m i(ψ) − (1 + (−1)ᵐ)/2 for a hyperbolic half block.
std::function<long long(long long)> hyperbolic_half_index(int i_psi);

/// ī̂ = î/2 for a hyperbolic symmetric orbit with half-path index i(ψ).
QuadNumber hyperbolic_symmetric_mean(int i_psi, int n = 2);

struct JumpRecord {
  IterationFormula formula;
  std::optional<int> splitting_plus;  // S⁺ of γ(τ) at 1
};

struct IndexJump {
  long long N = 0;
  std::vector<long long> m;  // one per record
};

/// All (N, m_1, ..., m_k) with N ≤ n_max, m_j ≥ 1 and, in Maslov
/// normalisation,
///   i(y_j, 2m_j + 1) = 2N + i(y_j, 1),
///   i(y_j, 2m_j − 1) + ν(y_j, 2m_j − 1) = 2N − (i(y_j, 1) + 2S⁺_j − ν(y_j, 1)).
/// Throws MissingSplittingNumber.
std::vector<IndexJump> find_index_jump(const std::vector<JumpRecord>& records, long long n_max);

}  // namespace maslovkit
