#include "maslovkit/flow.hpp"

#include "maslovkit/errors.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace maslovkit {
namespace {

namespace odeint = boost::numeric::odeint;
using State = std::vector<double>;

// Integrates rhs through the given output times, calling obs at each.
template <class Rhs, class Obs>
void run_dense(Rhs&& rhs, State& x, const std::vector<double>& times, double abs_tol, double rel_tol, Obs&& obs) {
  auto stepper = odeint::make_dense_output(abs_tol, rel_tol, odeint::runge_kutta_dopri5<State>());
  const double dt0 = std::max(1e-6, (times.back() - times.front()) / (times.size() * 8.0));
  try {
    odeint::integrate_times(stepper, rhs, x, times.begin(), times.end(), dt0, obs,
                            odeint::max_step_checker(200000));
  } catch (const odeint::odeint_error& e) {
    throw Error(ErrorKind::StepUnderflow, e.what());
  }
  if (!std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); }))
    throw Error(ErrorKind::StepUnderflow, "non-finite state");
}

std::vector<double> uniform_times(double t_end, int samples) {
  std::vector<double> t(samples + 1);
  for (int i = 0; i <= samples; ++i) t[i] = t_end * static_cast<double>(i) / samples;
  t.back() = t_end;
  return t;
}

void require_on_surface(const GaugeSurface& s, const Vec& y0, double tol) {
  if (y0.size() != s.dim()) throw Error(ErrorKind::InvalidInput, "seed dimension mismatch");
  if (std::abs(gauge_eval(s, y0) - 1.0) > tol) throw Error(ErrorKind::OffSurface, "seed is not on the surface");
}

Vec flow_field(const GaugeSurface& s, const Vec& y, const Mat& j) { return j * extended_normal(s, y); }

// One pass of the coupled (y, Z) system; `linear` picks the matrix B(y) in Ż = J B Z.
template <class Linear>
void integrate_coupled(const GaugeSurface& s, const Vec& y0, const std::vector<double>& times, const FlowOptions& o,
                       Linear&& linear, std::vector<Vec>& ys, std::vector<Mat>& zs) {
  const int d = s.dim();
  const Mat jm = standard_j(d / 2);
  State x(d + d * d, 0.0);
  std::copy(y0.data(), y0.data() + d, x.begin());
  for (int i = 0; i < d; ++i) x[d + i * d + i] = 1.0;

  auto rhs = [&](const State& in, State& out, double) {
    Eigen::Map<const Vec> y(in.data(), d);
    Eigen::Map<const Mat> z(in.data() + d, d, d);
    Eigen::Map<Vec> dy(out.data(), d);
    Eigen::Map<Mat> dz(out.data() + d, d, d);
    const Vec yy = y;
    dy = flow_field(s, yy, jm);
    dz = jm * linear(yy) * z;
  };
  ys.clear();
  zs.clear();
  auto obs = [&](const State& st, double) {
    ys.emplace_back(Eigen::Map<const Vec>(st.data(), d));
    zs.emplace_back(Eigen::Map<const Mat>(st.data() + d, d, d));
  };
  run_dense(rhs, x, times, o.abs_tol, o.rel_tol, obs);
}

double drift_of(const GaugeSurface& s, const std::vector<Vec>& ys) {
  double m = 0.0;
  for (const auto& y : ys) m = std::max(m, std::abs(gauge_eval(s, y) - 1.0));
  return m;
}

FlowOptions tightened(FlowOptions o) {
  o.rel_tol *= 0.01;
  o.abs_tol *= 0.01;
  return o;
}

}  // namespace

double Trajectory::max_drift() const { return drift_of(surface, states); }

double SymplecticPath::max_symplectic_drift() const {
  double m = 0.0;
  for (const auto& g : matrices) m = std::max(m, symplectic_defect(g));
  return m;
}

int default_samples(const GaugeSurface& surface, const Vec& y0, double duration, double alpha) {
  const Mat a = gauge_hessian(surface, y0, alpha) / alpha;
  const double speed = (standard_j(surface.dim_half()) * a).norm();  // Frobenius bounds the spectral norm
  const double turns = speed * duration / (2.0 * std::numbers::pi);
  return std::max(256, static_cast<int>(std::ceil(128.0 * turns)));
}

Trajectory integrate_flow(const GaugeSurface& surface, const Vec& y0, double t_end, const FlowOptions& opts) {
  require_on_surface(surface, y0, 1e-8);
  if (!(t_end > 0.0)) throw Error(ErrorKind::InvalidInput, "t_end must be positive");
  const int d = surface.dim();
  const Mat jm = standard_j(d / 2);
  const int samples = opts.samples > 0 ? opts.samples : default_samples(surface, y0, t_end);
  const auto times = uniform_times(t_end, samples);

  auto attempt = [&](const FlowOptions& o) {
    Trajectory tr{surface, {}, {}};
    State x(y0.data(), y0.data() + d);
    auto rhs = [&](const State& in, State& out, double) {
      Eigen::Map<Vec>(out.data(), d) = flow_field(surface, Eigen::Map<const Vec>(in.data(), d), jm);
    };
    auto obs = [&](const State& st, double t) {
      tr.times.push_back(t);
      tr.states.emplace_back(Eigen::Map<const Vec>(st.data(), d));
    };
    run_dense(rhs, x, times, o.abs_tol, o.rel_tol, obs);
    return tr;
  };

  Trajectory tr = attempt(opts);
  if (tr.max_drift() > opts.drift_tol) {
    tr = attempt(tightened(opts));
    if (tr.max_drift() > opts.drift_tol)
      throw Error(ErrorKind::ToleranceExceeded, "on-surface drift " + std::to_string(tr.max_drift()));
  }
  return tr;
}

FlowMapDerivative flow_with_derivative(const GaugeSurface& surface, const Vec& y0, double t, const FlowOptions& opts) {
  if (y0.size() != surface.dim()) throw Error(ErrorKind::InvalidInput, "seed dimension mismatch");
  if (!(t > 0.0)) throw Error(ErrorKind::InvalidInput, "flow time must be positive");
  std::vector<Vec> ys;
  std::vector<Mat> zs;
  auto linear = [&](const Vec& y) { return extended_normal_jacobian(surface, y); };
  integrate_coupled(surface, y0, {0.0, t}, opts, linear, ys, zs);
  const Mat jm = standard_j(surface.dim_half());
  return {ys.back(), zs.back(), flow_field(surface, ys.back(), jm)};
}

SymplecticPath monodromy_path(const GaugeSurface& surface, const Vec& y0, double period, PathSpan span, double alpha,
                              const FlowOptions& opts) {
  require_on_surface(surface, y0, 1e-8);
  if (!(period > 0.0)) throw Error(ErrorKind::InvalidInput, "period must be positive");
  if (!span.half && span.periods < 1) throw Error(ErrorKind::InvalidInput, "iterate must be positive");
  const double t_end = span.half ? 0.5 * period : period;
  const int samples = opts.samples > 0 ? opts.samples : default_samples(surface, y0, t_end, alpha);
  const auto times = uniform_times(t_end, samples);
  auto linear = [&](const Vec& y) { return Mat(gauge_hessian(surface, y, alpha) / alpha); };

  std::vector<Vec> ys;
  std::vector<Mat> zs;
  integrate_coupled(surface, y0, times, opts, linear, ys, zs);
  SymplecticPath path{times, zs};
  if (drift_of(surface, ys) > opts.drift_tol || path.max_symplectic_drift() > 1e-8) {
    integrate_coupled(surface, y0, times, tightened(opts), linear, ys, zs);
    path.matrices = zs;
    if (drift_of(surface, ys) > opts.drift_tol)
      throw Error(ErrorKind::ToleranceExceeded, "on-surface drift along monodromy path");
    if (path.max_symplectic_drift() > 1e-8)
      throw Error(ErrorKind::ToleranceExceeded,
                  "symplecticity drift " + std::to_string(path.max_symplectic_drift()));
  }
  if (span.half) {
    if ((ys.back() + y0).norm() > 1e-7) throw Error(ErrorKind::NotAntiperiodic, "y(tau/2) != -y(0)");
    return path;
  }
  return span.periods == 1 ? path : iterate_path(path, span.periods);
}

SymplecticPath iterate_path(const SymplecticPath& one_period, int m) {
  if (m < 1) throw Error(ErrorKind::InvalidInput, "iterate must be positive");
  SymplecticPath out = one_period;
  for (int k = 1; k < m; ++k) out = concatenate(out, one_period);
  return out;
}

SymplecticPath concatenate(const SymplecticPath& a, const SymplecticPath& b) {
  SymplecticPath out = a;
  const double t0 = a.duration();
  const Mat end = a.end();
  for (std::size_t i = 1; i < b.times.size(); ++i) {
    out.times.push_back(t0 + b.times[i]);
    out.matrices.push_back(b.matrices[i] * end);
  }
  return out;
}

SymplecticPath path_from_function(double duration, int samples, const std::function<Mat(double)>& f) {
  if (samples < 1 || !(duration > 0.0)) throw Error(ErrorKind::InvalidInput, "invalid path sampling");
  SymplecticPath p;
  p.times = uniform_times(duration, samples);
  for (double t : p.times) p.matrices.push_back(f(t));
  return p;
}

bool check_symmetric(const GaugeSurface& surface, const Vec& y0, double period, double tol) {
  FlowOptions o;
  const int half = std::max(128, default_samples(surface, y0, 0.5 * period));
  o.samples = 2 * half;
  const Trajectory tr = integrate_flow(surface, y0, period, o);
  double worst = 0.0;
  for (int i = 0; i <= half; ++i) worst = std::max(worst, (tr.states[i + half] + tr.states[i]).norm());
  return worst <= tol;
}

std::string trajectory_csv(const Trajectory& t) {
  std::ostringstream os;
  os.precision(17);
  os << "t";
  for (int i = 0; i < t.surface.dim(); ++i) os << ",y" << i + 1;
  os << "\n";
  for (std::size_t k = 0; k < t.times.size(); ++k) {
    os << t.times[k];
    for (int i = 0; i < t.states[k].size(); ++i) os << "," << t.states[k](i);
    os << "\n";
  }
  return os.str();
}

std::string path_csv(const SymplecticPath& p) {
  std::ostringstream os;
  os.precision(17);
  const int d = static_cast<int>(p.matrices.front().rows());
  os << "t";
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) os << ",m" << r + 1 << "_" << c + 1;
  os << "\n";
  for (std::size_t k = 0; k < p.times.size(); ++k) {
    os << p.times[k];
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) os << "," << p.matrices[k](r, c);
    os << "\n";
  }
  return os.str();
}

}  // namespace maslovkit
