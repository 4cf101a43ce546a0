#include "maslovkit/index.hpp"

#include "maslovkit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace maslovkit {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kMaxStepAngle = std::numbers::pi / 4.0;

bool is_real_unit(Complex omega) { return std::abs(omega.imag()) < 1e-12 && std::abs(std::abs(omega.real()) - 1.0) < 1e-12; }
bool is_one(Complex omega) { return std::abs(omega - 1.0) < 1e-12; }

double principal(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  return a;
}

// Spectral flow of W(t) = U_ω* U(t), with U the Souriau unitary of a
// Lagrangian subspace of (C^{4n}, diag(−J, J)).
class Engine {
 public:
  Engine(int n, Complex omega) : n_(n), omega_(omega) {
    const int d = 2 * n;
    const Mat jm = standard_j(n);
    Mat jt = Mat::Zero(2 * d, 2 * d);
    jt.topLeftCorner(d, d) = -jm;
    jt.bottomRightCorner(d, d) = jm;
    const CMat h = Complex(0.0, 1.0) * jt.cast<Complex>();
    Eigen::SelfAdjointEigenSolver<CMat> es(h);
    em_ = es.eigenvectors().leftCols(d);   // eigenvalue −1
    ep_ = es.eigenvectors().rightCols(d);  // eigenvalue +1
    CMat ref(2 * d, d);
    ref.topRows(d) = CMat::Identity(d, d);
    ref.bottomRows(d) = omega * CMat::Identity(d, d);
    ref /= std::sqrt(2.0);
    uref_adj_ = unitary_of_frame(ref).adjoint();
  }

  CMat w(const Mat& m) const { return uref_adj_ * unitary_of_frame(graph_frame(m)); }

  // Σ of the eigen-angles of W_a⁻¹ W_b, each required to stay below π/4.
  double step(const CMat& wa, const CMat& wb, double t) const {
    Eigen::ComplexEigenSolver<CMat> es(wa.adjoint() * wb, false);
    double sum = 0.0;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
      const double a = std::arg(es.eigenvalues()(i));
      if (std::abs(a) > kMaxStepAngle)
        throw Error(ErrorKind::UnresolvedCrossing, "eigenvalue turns too far near t = " + std::to_string(t));
      sum += a;
    }
    return sum;
  }

  double principal_sum(const CMat& wm) const {
    Eigen::ComplexEigenSolver<CMat> es(wm, false);
    double sum = 0.0;
    for (int i = 0; i < es.eigenvalues().size(); ++i) sum += principal(std::arg(es.eigenvalues()(i)));
    return sum;
  }

  // Σφ(0) for a path starting at I.
  double start_sum() const { return is_one(omega_) ? 0.0 : principal_sum(w(Mat::Identity(2 * n_, 2 * n_))); }

  // Index of a path whose accumulated angle is delta and which ends at m_end
  // with W(m_end) = w_end.
  int finish(double delta, const Mat& m_end, const CMat& w_end) const {
    const int base = is_one(omega_) ? n_ : 0;
    if (!is_real_unit(omega_) || nullity(m_end) == 0) return base + to_int(delta - principal_sum(w_end) + start_sum());
    int results[2];
    const double eps[2] = {1e-6, 2e-6};
    const Mat jm = standard_j(n_);
    for (int r = 0; r < 2; ++r) {
      double d = delta;
      CMat prev = w_end;
      const int sub = 4;
      for (int s = 1; s <= sub; ++s) {
        const Mat rot = (Mat::Identity(2 * n_, 2 * n_) * std::cos(eps[r] * s / sub)) - jm * std::sin(eps[r] * s / sub);
        const CMat cur = w(rot * m_end);
        d += step(prev, cur, -1.0);
        prev = cur;
      }
      results[r] = base + to_int(d - principal_sum(prev) + start_sum());
    }
    if (results[0] != results[1])
      throw Error(ErrorKind::NonIntegerStability, "endpoint regularisations disagree");
    return results[0];
  }

  int nullity(const Mat& m) const {
    const CMat a = m.cast<Complex>() - omega_ * CMat::Identity(m.rows(), m.cols());
    return kernel_dimension(a, 1e-6);
  }

 private:
  // Orthonormal frame of {(x, Mx)} from the SVD M = U Σ Vᵀ; stays well
  // conditioned when M has large entries.
  static CMat graph_frame(const Mat& m) {
    const int d = static_cast<int>(m.rows());
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vec s = svd.singularValues();
    Mat z(2 * d, d);
    for (int i = 0; i < d; ++i) {
      const double nrm = std::sqrt(1.0 + s(i) * s(i));
      z.col(i).head(d) = svd.matrixV().col(i) / nrm;
      z.col(i).tail(d) = svd.matrixU().col(i) * (s(i) / nrm);
    }
    return z.cast<Complex>();
  }

  CMat unitary_of_frame(const CMat& z) const {
    const CMat a = ep_.adjoint() * z;
    const CMat b = em_.adjoint() * z;
    return b * a.inverse();
  }

  static int to_int(double turns_times_2pi) {
    const double v = turns_times_2pi / kTwoPi;
    const double r = std::round(v);
    if (std::abs(v - r) > 1e-6) throw Error(ErrorKind::NonIntegerStability, "non-integer spectral flow " + std::to_string(v));
    return static_cast<int>(r);
  }

  int n_;
  Complex omega_;
  CMat ep_, em_, uref_adj_;
};

// Accumulates the eigen-angle flow of W along path.matrices[i] * right.
double accumulate(const Engine& e, const SymplecticPath& path, const Mat& right, CMat& w_prev, double t0) {
  double delta = 0.0;
  for (std::size_t i = 1; i < path.matrices.size(); ++i) {
    const CMat cur = e.w(path.matrices[i] * right);
    delta += e.step(w_prev, cur, t0 + path.times[i]);
    w_prev = cur;
  }
  return delta;
}

void require_path(const SymplecticPath& p) {
  if (p.matrices.size() < 2 || p.matrices.size() != p.times.size())
    throw Error(ErrorKind::InvalidInput, "path needs at least two samples");
  const int d = static_cast<int>(p.matrices.front().rows());
  if (max_abs(p.matrices.front() - Mat::Identity(d, d)) > 1e-8)
    throw Error(ErrorKind::InvalidInput, "path must start at the identity");
}

}  // namespace

int omega_nullity(const Mat& m, Complex omega, double tol) {
  if (symplectic_defect(m) > 1e-7) throw Error(ErrorKind::NotSymplectic, "matrix is not symplectic");
  const CMat a = m.cast<Complex>() - omega * CMat::Identity(m.rows(), m.cols());
  return kernel_dimension(a, tol);
}

int omega_index(const SymplecticPath& path, Complex omega) {
  require_path(path);
  const Engine e(path.dim_half(), omega);
  const int d = 2 * path.dim_half();
  CMat w_prev = e.w(path.matrices.front());
  const double delta = accumulate(e, path, Mat::Identity(d, d), w_prev, 0.0);
  return e.finish(delta, path.end(), w_prev);
}

int omega_index_refined(const PathSource& source, int samples, Complex omega) {
  for (int attempt = 0;; ++attempt) {
    try {
      return omega_index(source(samples), omega);
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::UnresolvedCrossing || attempt == 4) throw;
      samples *= 2;
    }
  }
}

std::vector<IterateEntry> iterate_indices(const SymplecticPath& one_period, int max_m, Complex omega) {
  require_path(one_period);
  if (max_m < 1) throw Error(ErrorKind::InvalidInput, "max_m must be positive");
  const Engine e(one_period.dim_half(), omega);
  const int d = 2 * one_period.dim_half();
  std::vector<IterateEntry> out;
  Mat power = Mat::Identity(d, d);
  CMat w_prev = e.w(power);
  double delta = 0.0;
  for (int m = 1; m <= max_m; ++m) {
    delta += accumulate(e, one_period, power, w_prev, (m - 1) * one_period.duration());
    power = one_period.end() * power;
    out.push_back({m, e.finish(delta, power, w_prev), e.nullity(power)});
  }
  return out;
}

SymmetricIndex symmetric_index(const SymplecticPath& half_path) {
  SymmetricIndex s;
  s.index = omega_index(half_path, -1.0);
  s.nullity = omega_nullity(half_path.end(), -1.0);
  s.nullity_in_band = s.nullity >= 1 && s.nullity <= 2 * half_path.dim_half() - 1;
  return s;
}

SymmetricIndex symmetric_index(const ClosedCharacteristic& orbit, const FlowOptions& opts, double alpha) {
  if (!orbit.symmetric) throw Error(ErrorKind::NotSymmetricOrbit, "orbit is not symmetric");
  const PathSource src = [&](int samples) {
    FlowOptions o = opts;
    o.samples = samples;
    return orbit_path(orbit, PathSpan::half_period(), o, alpha);
  };
  const int samples = opts.samples > 0 ? opts.samples : default_samples(orbit.surface, orbit.y0, 0.5 * orbit.period, alpha);
  SymmetricIndex s;
  s.index = omega_index_refined(src, samples, -1.0);
  const Mat end = orbit.half_monodromy ? *orbit.half_monodromy : src(samples).end();
  s.nullity = omega_nullity(end, -1.0);
  s.nullity_in_band = s.nullity >= 1 && s.nullity <= 2 * orbit.surface.dim_half() - 1;
  return s;
}

MorseIndex morse_translate(int i_maslov, int nullity, int n) { return {i_maslov - n, nullity}; }

BottResidual bott_check(const SymplecticPath& one_period) {
  BottResidual r;
  r.doubled = omega_index(iterate_path(one_period, 2), 1.0);
  r.split = omega_index(one_period, 1.0) + omega_index(one_period, -1.0);
  return r;
}

SplittingNumbers splitting_number(const SymplecticPath& path, Complex omega) {
  if (omega_nullity(path.end(), omega) == 0) return {};
  const int base = omega_index(path, omega);
  SplittingNumbers res[2];
  const double eps[2] = {1e-4, 5e-5};
  for (int k = 0; k < 2; ++k) {
    const Complex up = omega * std::polar(1.0, eps[k]);
    const Complex down = omega * std::polar(1.0, -eps[k]);
    res[k] = {omega_index(path, up) - base, omega_index(path, down) - base};
  }
  if (res[0].plus != res[1].plus || res[0].minus != res[1].minus)
    throw Error(ErrorKind::LimitUnstable, "splitting numbers depend on epsilon");
  return res[0];
}

RationalInterval mean_index_bracket(const std::vector<std::pair<int, int>>& morse_table, int n) {
  if (morse_table.empty()) throw Error(ErrorKind::InvalidInput, "empty iterate table");
  RationalInterval r;
  bool first = true;
  for (const auto& [m, i] : morse_table) {
    if (m < 1) throw Error(ErrorKind::InvalidInput, "iterates start at 1");
    const Rational lo = make_rational(i - 2 * n, m);
    const Rational hi = make_rational(i + 2 * n, m);
    if (first || lo > r.lo) r.lo = lo;
    if (first || hi < r.hi) r.hi = hi;
    first = false;
  }
  if (r.lo > r.hi) throw Error(ErrorKind::EmptyIntersection, "index bound violated across iterates");
  return r;
}

QuadNumber symmetric_mean_index(const QuadNumber& ihat) { return ihat / QuadNumber(Rational(2)); }

RationalInterval symmetric_mean_index(const RationalInterval& ihat) { return {ihat.lo / 2, ihat.hi / 2}; }

QuadNumber ellipsoid_mean_index(const std::vector<QuadNumber>& radii_squared, int j) {
  if (j < 0 || j >= static_cast<int>(radii_squared.size())) throw Error(ErrorKind::InvalidInput, "plane index out of range");
  QuadNumber sum;
  for (const auto& r2 : radii_squared) sum += radii_squared[j] / r2;
  return QuadNumber(Rational(2)) * sum;
}

MorseIndex IndexRecord::morse(int m) const {
  for (const auto& e : iterates)
    if (e.m == m) return morse_translate(e.maslov, e.nullity, n);
  throw Error(ErrorKind::InvalidInput, "iterate " + std::to_string(m) + " not tabulated");
}

IndexRecord index_record(const ClosedCharacteristic& orbit, const IndexOptions& opts) {
  IndexRecord rec;
  rec.n = orbit.surface.dim_half();
  const PathSource src = [&](int samples) {
    FlowOptions o = opts.flow;
    o.samples = samples;
    return orbit_path(orbit, PathSpan::whole(), o, opts.alpha);
  };
  int samples = opts.flow.samples > 0 ? opts.flow.samples : default_samples(orbit.surface, orbit.y0, orbit.period, opts.alpha);

  // Products of a hyperbolic monodromy lose the contracting direction in
  // double precision; cap the table where the spectral radius reaches 1e8.
  int max_m = opts.max_iterate;
  double radius = 1.0;
  for (const auto& lam : sorted_eigenvalues(orbit.monodromy)) radius = std::max(radius, std::abs(lam));
  if (radius > 1.0 + 1e-6) max_m = std::clamp(static_cast<int>(8.0 / std::log10(radius)), 1, max_m);

  for (int attempt = 0;; ++attempt) {
    try {
      rec.iterates = iterate_indices(src(samples), max_m);
      break;
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::UnresolvedCrossing || attempt == 4) throw;
      samples *= 2;
    }
  }
  rec.i1 = rec.iterates.front().maslov;
  rec.nu1 = rec.iterates.front().nullity;
  if (orbit.symmetric) {
    const SymmetricIndex s = symmetric_index(orbit, opts.flow, opts.alpha);
    rec.im1 = s.index;
    rec.num1 = s.nullity;
  }
  std::vector<std::pair<int, int>> table;
  for (const auto& e : rec.iterates) table.emplace_back(e.m, e.maslov - rec.n);
  rec.mean_bracket = mean_index_bracket(table, rec.n);
  if (orbit.plane >= 0 && orbit.surface.radii_squared_exact())
    rec.mean_exact = ellipsoid_mean_index(*orbit.surface.radii_squared_exact(), orbit.plane);
  return rec;
}

}  // namespace maslovkit
