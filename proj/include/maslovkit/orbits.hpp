#pragma once

#include "maslovkit/exact.hpp"
#include "maslovkit/flow.hpp"

#include <optional>
#include <string>
#include <vector>

namespace maslovkit {

/// A closed characteristic (τ, y) of Σ.
struct ClosedCharacteristic {
  GaugeSurface surface;
  double period = 0.0;
  Vec y0;
  bool symmetric = false;
  bool prime = true;
  double prime_period = 0.0;
  Mat monodromy;                 // γ(τ)
  std::optional<Mat> half_monodromy;  // γ(τ/2), symmetric orbits only
  /// Closed-form data for ellipsoid orbits.
  int plane = -1;
  std::optional<QuadNumber> period_over_2pi;  // r_k² when known exactly
};

enum class StabilityKind { Elliptic, Hyperbolic, Degenerate, Mixed };
std::string to_string(StabilityKind k);

struct StabilityClass {
  StabilityKind kind = StabilityKind::Mixed;
  std::vector<Complex> multipliers;  // sorted by (arg, modulus)
  std::vector<double> angles;        // one per unit-circle pair, in [0, 2π)
};

struct Thresholds {
  double on_circle = 1e-7;  // ||λ| − 1| ≤ on_circle counts as on U
  double at_one = 1e-5;     // |λ − 1| ≤ at_one counts as λ = 1
  double off_circle = 1e-5; // hyperbolic multipliers must sit this far off U
};

/// The n planar circles y_k(t) = r_k (cos(t/r_k²) e_k + sin(t/r_k²) e_{k+n}).
/// Monodromies are written in closed form; they are not integrated.
std::vector<ClosedCharacteristic> ellipsoid_orbits(const GaugeSurface& ellipsoid, double alpha = kDefaultAlpha);

/// Closed-form γ(t) for plane orbit k of an ellipsoid (orbit time, H = j^α).
Mat ellipsoid_monodromy(const std::vector<double>& radii, int k, double t, double alpha = kDefaultAlpha);
SymplecticPath ellipsoid_path(const std::vector<double>& radii, int k, double duration, int samples,
                              double alpha = kDefaultAlpha);

struct ShootOptions {
  int max_steps = 50;
  double tol = 1e-9;
  double singular_tol = 1e-10;
  int max_divisor = 12;  // divisor scan range for the prime test
  double alpha = kDefaultAlpha;
  bool compute_monodromy = true;
};

/// Gauss–Newton on (y, τ) with the section (y − y_s)·ẏ_s = 0 and j(y) = 1.
/// Throws NoConvergence and SingularJacobian.
ClosedCharacteristic shoot_orbit(const GaugeSurface& surface, const Vec& seed, double period_guess,
                                 const ShootOptions& opts = {});

/// Eigen-analysis of a symplectic matrix. Throws NotSymplectic when
/// ‖MᵀJM − J‖∞ > 1e−6.
StabilityClass classify_stability(const Mat& gamma_tau, const Thresholds& th = {});

/// Number of singular values of (γ − I)² below tol; ≥ 2 means the
/// eigenvalue 1 has algebraic multiplicity at least two.
int unit_multiplicity(const Mat& gamma, double tol = 1e-5);

/// The path of an orbit over a half period or m periods.
SymplecticPath orbit_path(const ClosedCharacteristic& orbit, PathSpan span, const FlowOptions& opts = {},
                          double alpha = kDefaultAlpha);

}  // namespace maslovkit
