#pragma once

#include "maslovkit/linalg.hpp"
#include "maslovkit/surface.hpp"

#include <functional>
#include <string>
#include <vector>

namespace maslovkit {

/// Samples of a solution of ẏ = J N_Σ(y).
struct Trajectory {
  GaugeSurface surface;
  std::vector<double> times;
  std::vector<Vec> states;

  double max_drift() const;  // max_t |j(y(t)) − 1|
};

/// Samples of a path M: [0, T] → Sp(2n) with M(0) = I.
struct SymplecticPath {
  std::vector<double> times;
  std::vector<Mat> matrices;

  int dim_half() const { return static_cast<int>(matrices.front().rows()) / 2; }
  double duration() const { return times.back(); }
  const Mat& end() const { return matrices.back(); }
  double max_symplectic_drift() const;
};

struct FlowOptions {
  double rel_tol = 1e-12;
  double abs_tol = 1e-12;
  double drift_tol = 1e-8;
  int samples = 0;  // 0 picks a density from the surface curvature
};

/// Length of a requested monodromy path: half a period, or m whole periods.
struct PathSpan {
  bool half = false;
  int periods = 1;

  static PathSpan half_period() { return {true, 1}; }
  static PathSpan whole(int m = 1) { return {false, m}; }
};

/// Integrates the characteristic flow from y0 ∈ Σ up to t_end.
///
/// Throws OffSurface for a seed off Σ, ToleranceExceeded if the drift
/// budget is violated even after one retry at a tighter tolerance, and
/// StepUnderflow when the adaptive step collapses.
Trajectory integrate_flow(const GaugeSurface& surface, const Vec& y0, double t_end, const FlowOptions& opts = {});

/// Flow map y0 ↦ y(t) together with its derivative, used by shooting.
struct FlowMapDerivative {
  Vec y;
  Mat dy;   // ∂y(t)/∂y0
  Vec vel;  // ẏ(t)
};
FlowMapDerivative flow_with_derivative(const GaugeSurface& surface, const Vec& y0, double t,
                                       const FlowOptions& opts = {});

/// Fundamental solution of ż = J A(t) z with A = (j^α)''(y(t))/α, which is
/// the linearised flow in orbit time. For PathSpan::whole(m) the path over
/// m periods is built as γ(t − kτ)γ(τ)^k from one integrated period.
///
/// Throws NotAntiperiodic when half a period is requested and
/// y(τ/2) ≠ −y(0) to 1e−7.
SymplecticPath monodromy_path(const GaugeSurface& surface, const Vec& y0, double period, PathSpan span,
                              double alpha = kDefaultAlpha, const FlowOptions& opts = {});

/// m-fold iterate γ^m of a one-period path: γ^m(t) = γ(t − kτ)γ(τ)^k.
SymplecticPath iterate_path(const SymplecticPath& one_period, int m);

/// Concatenation a * b: b runs after a, and is multiplied by a(T_a).
SymplecticPath concatenate(const SymplecticPath& a, const SymplecticPath& b);

/// Samples an explicitly given path f on `samples` uniform steps of [0, duration].
SymplecticPath path_from_function(double duration, int samples, const std::function<Mat(double)>& f);

/// True iff max_t |y(t + τ/2) + y(t)| ≤ tol over the sampled half period.
bool check_symmetric(const GaugeSurface& surface, const Vec& y0, double period, double tol = 1e-7);

/// Default sample count for a path of the given duration starting at y0:
/// at least 64 samples per 2π of the fastest local rotation.
int default_samples(const GaugeSurface& surface, const Vec& y0, double duration, double alpha = kDefaultAlpha);

std::string trajectory_csv(const Trajectory& t);
std::string path_csv(const SymplecticPath& p);

}  // namespace maslovkit
