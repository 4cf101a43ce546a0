#pragma once

#include "maslovkit/exact.hpp"
#include "maslovkit/flow.hpp"
#include "maslovkit/orbits.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace maslovkit {

/// Number of singular values of M − ωI below tol. Throws NotSymplectic when
/// ‖MᵀJM − J‖∞ > 1e−7.
int omega_nullity(const Mat& m, Complex omega = 1.0, double tol = 1e-6);

/// ω-index i_ω(γ) of a sampled symplectic path, ω ∈ U.
///
/// Computed as the spectral flow through 1 of W(t) = U_ω⁻¹ U(t), where U(t)
/// is the unitary (Souriau) representative of the graph of γ(t) and U_ω that
/// of ωI. A degenerate endpoint (ω = ±1) is pushed off by e^{−εJ} for two
/// values of ε which must agree. Throws UnresolvedCrossing when a sampling
/// step turns an eigenvalue of W by more than π/4, NonIntegerStability when
/// the two regularisations disagree.
int omega_index(const SymplecticPath& path, Complex omega = 1.0);

/// Produces a path at a requested sample count; used for refinement.
using PathSource = std::function<SymplecticPath(int samples)>;

/// omega_index with up to four doublings of the sampling on UnresolvedCrossing.
int omega_index_refined(const PathSource& source, int samples, Complex omega = 1.0);

struct IterateEntry {
  int m = 1;
  int maslov = 0;   // i(y, m)
  int nullity = 0;  // ν(y, m)
};

/// i(y, m) and ν(y, m) for m = 1..max_m from one sampled period, built
/// incrementally along γ(t − kτ)γ(τ)^k.
std::vector<IterateEntry> iterate_indices(const SymplecticPath& one_period, int max_m, Complex omega = 1.0);

struct SymmetricIndex {
  int index = 0;    // ī = i₋₁(ψ)
  int nullity = 0;  // ν̄ = ν₋₁(ψ(τ/2))
  bool nullity_in_band = true;  // 1 ≤ ν̄ ≤ 2n − 1
};

SymmetricIndex symmetric_index(const SymplecticPath& half_path);
/// Throws NotSymmetricOrbit unless the orbit is symmetric.
SymmetricIndex symmetric_index(const ClosedCharacteristic& orbit, const FlowOptions& opts = {},
                               double alpha = kDefaultAlpha);

struct MorseIndex {
  int index = 0;
  int nullity = 0;
};
/// i(yᵐ) = i(y, m) − n; the nullity is unchanged.
MorseIndex morse_translate(int i_maslov, int nullity, int n);

struct BottResidual {
  int doubled = 0;  // i₁ of the two-period path
  int split = 0;    // i₁(γ) + i₋₁(γ)
  bool holds() const { return doubled == split; }
};
BottResidual bott_check(const SymplecticPath& one_period);

struct SplittingNumbers {
  int plus = 0;
  int minus = 0;
};
/// S±(ω) = lim_{ε→0⁺} i_{ωe^{±iε}}(γ) − i_ω(γ) from ε ∈ {1e−4, 5e−5}.
/// Throws LimitUnstable when the two evaluations differ.
SplittingNumbers splitting_number(const SymplecticPath& path, Complex omega = 1.0);

/// Closed interval with rational endpoints.
struct RationalInterval {
  Rational lo{0};
  Rational hi{0};
  bool contains(const Rational& x) const { return lo <= x && x <= hi; }
  bool contains(const QuadNumber& x) const { return QuadNumber(lo) <= x && x <= QuadNumber(hi); }
  Rational width() const { return hi - lo; }
};

/// ∩_m [(i_m − 2n)/m, (i_m + 2n)/m] over the table, indices in Morse
/// normalisation. Throws EmptyIntersection.
RationalInterval mean_index_bracket(const std::vector<std::pair<int, int>>& morse_table, int n);

/// î/2, for symmetric orbits.
QuadNumber symmetric_mean_index(const QuadNumber& ihat);
RationalInterval symmetric_mean_index(const RationalInterval& ihat);

/// Exact mean index 2 Σ_k r_j²/r_k² of plane orbit j of an ellipsoid.
QuadNumber ellipsoid_mean_index(const std::vector<QuadNumber>& radii_squared, int j);

struct IndexRecord {
  int n = 0;
  int i1 = 0;   // i(y, 1)
  int nu1 = 0;
  std::optional<int> im1;   // ī(y) for symmetric orbits
  std::optional<int> num1;  // ν̄(y)
  std::vector<IterateEntry> iterates;  // Maslov normalisation
  RationalInterval mean_bracket;
  std::optional<QuadNumber> mean_exact;

  MorseIndex morse(int m) const;
};

struct IndexOptions {
  int max_iterate = 64;
  double alpha = kDefaultAlpha;
  FlowOptions flow;
};

IndexRecord index_record(const ClosedCharacteristic& orbit, const IndexOptions& opts = {});

}  // namespace maslovkit
