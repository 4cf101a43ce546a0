#include "maslovkit/orbits.hpp"

#include "maslovkit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace maslovkit {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi - 1e-12) a = 0.0;
  return a;
}

Vec plane_point(int n, int k, double r, double s) {
  Vec y = Vec::Zero(2 * n);
  y(k) = r * std::cos(s);
  y(k + n) = r * std::sin(s);
  return y;
}

}  // namespace

std::string to_string(StabilityKind k) {
  switch (k) {
    case StabilityKind::Elliptic: return "elliptic";
    case StabilityKind::Hyperbolic: return "hyperbolic";
    case StabilityKind::Degenerate: return "degenerate";
    case StabilityKind::Mixed: return "mixed";
  }
  return "mixed";
}

Mat ellipsoid_monodromy(const std::vector<double>& radii, int k, double t, double alpha) {
  const int n = static_cast<int>(radii.size());
  if (k < 0 || k >= n) throw Error(ErrorKind::InvalidInput, "plane index out of range");
  Mat g = Mat::Zero(2 * n, 2 * n);
  for (int l = 0; l < n; ++l) {
    const double r2 = radii[l] * radii[l];
    Mat block = rotation(t / r2);
    if (l == k) {
      Mat shear = Mat::Identity(2, 2);
      shear(1, 0) = (alpha - 2.0) * t / r2;
      block = block * shear;
    }
    g(l, l) = block(0, 0);
    g(l, l + n) = block(0, 1);
    g(l + n, l) = block(1, 0);
    g(l + n, l + n) = block(1, 1);
  }
  return g;
}

SymplecticPath ellipsoid_path(const std::vector<double>& radii, int k, double duration, int samples, double alpha) {
  return path_from_function(duration, samples, [&](double t) { return ellipsoid_monodromy(radii, k, t, alpha); });
}

std::vector<ClosedCharacteristic> ellipsoid_orbits(const GaugeSurface& ellipsoid, double alpha) {
  if (!ellipsoid.is_ellipsoid()) throw Error(ErrorKind::InvalidInput, "closed-form orbits need an ellipsoid");
  const auto& radii = ellipsoid.radii();
  const int n = ellipsoid.dim_half();
  std::vector<ClosedCharacteristic> out;
  for (int k = 0; k < n; ++k) {
    ClosedCharacteristic c;
    c.surface = ellipsoid;
    c.period = kTwoPi * radii[k] * radii[k];
    c.y0 = plane_point(n, k, radii[k], 0.0);
    c.symmetric = true;
    c.prime = true;
    c.prime_period = c.period;
    c.monodromy = ellipsoid_monodromy(radii, k, c.period, alpha);
    c.half_monodromy = ellipsoid_monodromy(radii, k, 0.5 * c.period, alpha);
    c.plane = k;
    if (ellipsoid.radii_squared_exact()) c.period_over_2pi = (*ellipsoid.radii_squared_exact())[k];
    out.push_back(std::move(c));
  }
  return out;
}

SymplecticPath orbit_path(const ClosedCharacteristic& orbit, PathSpan span, const FlowOptions& opts, double alpha) {
  if (span.half && !orbit.symmetric) throw Error(ErrorKind::NotAntiperiodic, "half path of a non-symmetric orbit");
  if (orbit.plane >= 0 && orbit.surface.is_ellipsoid()) {
    const double duration = span.half ? 0.5 * orbit.period : orbit.period;
    const int samples =
        opts.samples > 0 ? opts.samples : default_samples(orbit.surface, orbit.y0, duration, alpha);
    SymplecticPath p = ellipsoid_path(orbit.surface.radii(), orbit.plane, duration, samples, alpha);
    return span.half || span.periods == 1 ? p : iterate_path(p, span.periods);
  }
  return monodromy_path(orbit.surface, orbit.y0, orbit.period, span, alpha, opts);
}

int unit_multiplicity(const Mat& gamma, double tol) {
  const Mat d = gamma - Mat::Identity(gamma.rows(), gamma.cols());
  return kernel_dimension(CMat((d * d).cast<Complex>()), tol);
}

StabilityClass classify_stability(const Mat& m, const Thresholds& th) {
  if (m.rows() != m.cols() || m.rows() % 2 != 0) throw Error(ErrorKind::InvalidInput, "matrix must be 2n x 2n");
  if (symplectic_defect(m) > 1e-6) throw Error(ErrorKind::NotSymplectic, "matrix is not symplectic");
  const int d = static_cast<int>(m.rows());
  const Mat jm = standard_j(d / 2);

  StabilityClass sc;
  sc.multipliers = sorted_eigenvalues(m);

  Eigen::ComplexEigenSolver<CMat> es(m.cast<Complex>());
  int near_one = 0, near_minus_one = 0, on_circle = 0, off_far = 0;
  for (int i = 0; i < d; ++i) {
    const Complex lam = es.eigenvalues()(i);
    const bool on_u = std::abs(std::abs(lam) - 1.0) <= th.on_circle;
    if (std::abs(lam - 1.0) <= th.at_one) {
      ++near_one;
      ++on_circle;
      continue;
    }
    if (std::abs(lam + 1.0) <= th.at_one) {
      ++near_minus_one;
      ++on_circle;
      continue;
    }
    if (on_u) {
      ++on_circle;
      const CVec v = es.eigenvectors().col(i);
      const double krein = (v.adjoint() * jm.cast<Complex>() * v)(0, 0).imag();
      if (krein > 0.0) sc.angles.push_back(wrap_angle(std::arg(lam)));
    } else if (std::abs(std::abs(lam) - 1.0) >= th.off_circle) {
      ++off_far;
    }
  }
  const int mult_one = std::max(near_one, unit_multiplicity(m, th.at_one));
  for (int i = 0; i < near_one / 2; ++i) sc.angles.push_back(0.0);
  for (int i = 0; i < near_minus_one / 2; ++i) sc.angles.push_back(std::numbers::pi);
  std::sort(sc.angles.begin(), sc.angles.end());

  if (mult_one > 2)
    sc.kind = StabilityKind::Degenerate;
  else if (on_circle == d)
    sc.kind = StabilityKind::Elliptic;
  else if (near_one == 2 && on_circle == 2 && off_far == d - 2)
    sc.kind = StabilityKind::Hyperbolic;
  else
    sc.kind = StabilityKind::Mixed;
  return sc;
}

ClosedCharacteristic shoot_orbit(const GaugeSurface& surface, const Vec& seed, double period_guess,
                                 const ShootOptions& opts) {
  const int d = surface.dim();
  if (seed.size() != d) throw Error(ErrorKind::InvalidInput, "seed dimension mismatch");
  if (std::abs(gauge_eval(surface, seed) - 1.0) > 1e-6) throw Error(ErrorKind::OffSurface, "seed is not on the surface");
  if (!(period_guess > 0.0)) throw Error(ErrorKind::InvalidInput, "period guess must be positive");

  const Mat jm = standard_j(d / 2);
  const Vec ys = seed;
  const Vec fs = jm * extended_normal(surface, ys);  // section normal ẏ_s
  Vec y = seed;
  double tau = period_guess;
  bool converged = false;

  for (int step = 0; step < opts.max_steps; ++step) {
    FlowMapDerivative fd;
    try {
      fd = flow_with_derivative(surface, y, tau);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::ZeroPoint || e.kind() == ErrorKind::StepUnderflow)
        throw Error(ErrorKind::NoConvergence, std::string("iterate left the domain: ") + e.what());
      throw;
    }
    Vec f(d + 2);
    f.head(d) = fd.y - y;
    f(d) = (y - ys).dot(fs);
    f(d + 1) = gauge_eval(surface, y) - 1.0;
    if (f.head(d).norm() <= opts.tol && std::abs(f(d + 1)) <= opts.tol && std::abs(f(d)) <= opts.tol) {
      converged = true;
      break;
    }
    Mat jac = Mat::Zero(d + 2, d + 1);
    jac.topLeftCorner(d, d) = fd.dy - Mat::Identity(d, d);
    jac.col(d).head(d) = fd.vel;
    jac.row(d).head(d) = fs.transpose();
    jac.row(d + 1).head(d) = gauge_gradient(surface, y).transpose();
    Eigen::JacobiSVD<Mat> svd(jac, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.singularValues().minCoeff() < opts.singular_tol)
      throw Error(ErrorKind::SingularJacobian, "section Jacobian is rank deficient");
    Vec delta = -svd.solve(f);
    const double scale = std::max(y.norm(), 1.0) * 0.25;
    if (delta.norm() > scale) delta *= scale / delta.norm();
    y += delta.head(d);
    tau += delta(d);
    if (!y.allFinite() || !(tau > 0.0) || tau > 100.0 * period_guess)
      throw Error(ErrorKind::NoConvergence, "Newton iterate diverged");
  }
  if (!converged) throw Error(ErrorKind::NoConvergence, "no convergence within the step budget");

  y /= gauge_eval(surface, y);
  ClosedCharacteristic c;
  c.surface = surface;
  c.period = tau;
  c.y0 = y;
  c.prime_period = tau;
  for (int div = opts.max_divisor; div >= 2; --div) {
    const Trajectory tr = integrate_flow(surface, y, tau / div);
    if ((tr.states.back() - y).norm() <= 1e-7) {
      c.prime = false;
      c.prime_period = tau / div;
      break;
    }
  }
  c.symmetric = check_symmetric(surface, y, tau);
  if (opts.compute_monodromy) {
    const SymplecticPath full = monodromy_path(surface, y, tau, PathSpan::whole(), opts.alpha);
    c.monodromy = full.end();
    if (c.symmetric) c.half_monodromy = monodromy_path(surface, y, tau, PathSpan::half_period(), opts.alpha).end();
  }
  return c;
}

}  // namespace maslovkit
