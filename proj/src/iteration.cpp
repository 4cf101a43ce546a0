#include "maslovkit/iteration.hpp"

#include "maslovkit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace maslovkit {
namespace {

constexpr double kPi = std::numbers::pi;

struct FormSigns {
  int pos = 0;
  int neg = 0;
};

// Signature of v ↦ −vᵀ sym(Jᵀ(M − λI)) v on the columns of q.
FormSigns nilpotent_form(const Mat& m, double lambda, const Mat& q, double tol) {
  const int d = static_cast<int>(m.rows());
  const Mat jt = standard_j(d / 2).transpose();
  const Mat nm = m - lambda * Mat::Identity(d, d);
  const Mat s = jt * nm;
  const Mat g = -q.transpose() * (0.5 * (s + s.transpose())) * q;
  Eigen::SelfAdjointEigenSolver<Mat> es(g);
  FormSigns f;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    if (es.eigenvalues()(i) > tol) ++f.pos;
    if (es.eigenvalues()(i) < -tol) ++f.neg;
  }
  return f;
}

// Orthonormal basis of ker((M − λI)²) of the given dimension.
Mat generalized_eigenspace(const Mat& m, double lambda, int dim) {
  const int d = static_cast<int>(m.rows());
  const Mat nm = m - lambda * Mat::Identity(d, d);
  Eigen::JacobiSVD<Mat> svd(nm * nm, Eigen::ComputeFullV);
  return svd.matrixV().rightCols(dim);
}

// Basis (s1, s2) of V with M s2 = s1 + s2 and s1ᵀ J s2 = −1.
std::pair<Vec, Vec> unit_jordan_basis(const Mat& m, const Mat& q) {
  const int d = static_cast<int>(m.rows());
  const Mat nm = m - Mat::Identity(d, d);
  Eigen::JacobiSVD<Mat> svd(nm * q, Eigen::ComputeFullV);
  const Vec s2 = q * svd.matrixV().col(0);
  const Vec s1 = nm * s2;
  const double c = s1.dot(standard_j(d / 2) * s2);
  if (!(c < 0.0)) throw Error(ErrorKind::NoUnitBlock, "unit block has the wrong orientation");
  const double t = std::sqrt(-1.0 / c);
  return {t * s1, t * s2};
}

void attach_witness(NormalFormSp4& nf, const Mat& m) {
  const Mat q = generalized_eigenspace(m, 1.0, 2);
  const auto [s1, s2] = unit_jordan_basis(m, q);
  const Mat nm = m - Mat::Identity(4, 4);
  Eigen::JacobiSVD<Mat> svd(nm * nm, Eigen::ComputeFullU);
  Vec w1 = svd.matrixU().col(0), w2 = svd.matrixU().col(1);
  const Mat jm = standard_j(2);
  const double dv = w1.dot(jm * w2);
  if (std::abs(dv) < 1e-12) throw Error(ErrorKind::AmbiguousCase, "transverse block is not symplectic");
  const double sc = 1.0 / std::sqrt(std::abs(dv));
  w1 *= sc;
  w2 *= dv < 0.0 ? sc : -sc;
  Mat s(4, 4);
  s.col(0) = s1;
  s.col(2) = s2;
  s.col(1) = w1;
  s.col(3) = w2;
  Mat sb(4, 2);
  sb << w1, w2;
  const Mat mt = sb.completeOrthogonalDecomposition().solve(m * sb);
  nf.transverse = mt;
  nf.witness = s;
  nf.witness_residual = max_abs(m - s * diamond(jordan_block(1.0, 1.0), mt) * s.inverse());
}

}  // namespace

std::string to_string(NormalCase c) {
  switch (c) {
    case NormalCase::Case1: return "case1";
    case NormalCase::Case2: return "case2";
    case NormalCase::Case3: return "case3";
    case NormalCase::Case4: return "case4";
    case NormalCase::Hyperbolic: return "hyperbolic";
  }
  return "hyperbolic";
}

std::optional<Rational> rational_approximation(double x, int max_den, double tol) {
  long long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double r = x;
  for (int it = 0; it < 64; ++it) {
    const double a = std::floor(r);
    const long long ai = static_cast<long long>(a);
    const long long h2 = ai * h1 + h0, k2 = ai * k1 + k0;
    if (k2 > max_den) break;
    if (std::abs(x - static_cast<double>(h2) / k2) <= tol) return Rational(Integer(h2), Integer(k2));
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    const double frac = r - a;
    if (frac < 1e-15) break;
    r = 1.0 / frac;
  }
  return std::nullopt;
}

NormalFormSp4 recognize_normal_form(const Mat& m, const RecognitionOptions& opts) {
  if (m.rows() != 4 || m.cols() != 4) throw Error(ErrorKind::InvalidInput, "normal forms are defined on Sp(4)");
  if (symplectic_defect(m) > 1e-6) throw Error(ErrorKind::NotSymplectic, "matrix is not symplectic");
  const auto& th = opts.thresholds;
  const double tol = opts.form_tol * std::max(1.0, max_abs(m));
  const Mat jm = standard_j(2);

  Eigen::ComplexEigenSolver<CMat> es(m.cast<Complex>());
  std::vector<int> rest;
  int near_one = 0;
  for (int i = 0; i < 4; ++i) {
    const double dist = std::abs(es.eigenvalues()(i) - 1.0);
    if (dist <= th.at_one)
      ++near_one;
    else if (dist <= 100.0 * th.at_one)
      throw Error(ErrorKind::AmbiguousCase, "eigenvalue inside the band around 1");
    else
      rest.push_back(i);
  }
  if (near_one < 2) throw Error(ErrorKind::NoUnitBlock, "fewer than two multipliers equal to 1");
  if (near_one == 3) throw Error(ErrorKind::AmbiguousCase, "odd number of multipliers at 1");

  NormalFormSp4 nf;
  const FormSigns unit = nilpotent_form(m, 1.0, generalized_eigenspace(m, 1.0, near_one), tol);
  if (near_one == 4) {
    if (unit.pos == 2 && unit.neg == 0) {
      nf.kind = NormalCase::Case3;
      nf.b = 1;
    } else if (unit.pos == 1 && unit.neg == 0) {
      nf.kind = NormalCase::Case3;
      nf.b = 0;
    } else if (unit.pos == 1 && unit.neg == 1) {
      nf.kind = NormalCase::Case4;
    } else {
      throw Error(ErrorKind::NoUnitBlock, "no N1(1,1) factor in the unit eigenspace");
    }
    return nf;
  }
  if (unit.pos != 1 || unit.neg != 0) throw Error(ErrorKind::NoUnitBlock, "no N1(1,1) factor in the unit eigenspace");

  const Complex mu = es.eigenvalues()(rest[0]);
  const Complex mu2 = es.eigenvalues()(rest[1]);
  const double dm1 = std::max(std::abs(mu + 1.0), std::abs(mu2 + 1.0));
  const double off = std::abs(std::abs(mu) - 1.0);
  if (dm1 <= th.at_one) {
    nf.kind = NormalCase::Case1;
    const FormSigns f = nilpotent_form(m, -1.0, generalized_eigenspace(m, -1.0, 2), tol);
    nf.b = f.pos > 0 ? 1 : (f.neg > 0 ? -1 : 0);
    if (f.pos > 0 && f.neg > 0) throw Error(ErrorKind::AmbiguousCase, "indefinite form at -1");
  } else if (dm1 <= 100.0 * th.at_one) {
    throw Error(ErrorKind::AmbiguousCase, "eigenvalue inside the band around -1");
  } else if (off <= th.on_circle) {
    nf.kind = NormalCase::Case2;
    for (int idx : rest) {
      const CVec v = es.eigenvectors().col(idx);
      const double krein = (v.adjoint() * jm.cast<Complex>() * v)(0, 0).imag();
      if (krein > 0.0) {
        double a = std::arg(es.eigenvalues()(idx));
        if (a < 0.0) a += 2.0 * kPi;
        nf.theta = a;
      }
    }
    nf.theta_over_pi = rational_approximation(nf.theta / kPi, opts.max_denominator, opts.rational_tol);
  } else if (off >= th.off_circle) {
    nf.kind = NormalCase::Hyperbolic;
    nf.negative_hyperbolic = mu.real() < 0.0;
  } else {
    throw Error(ErrorKind::AmbiguousCase, "transverse multiplier inside the band around U");
  }
  attach_witness(nf, m);
  return nf;
}

IterationFormula::IterationFormula(NormalFormSp4 nf, int i_morse, std::optional<QuadNumber> rotation_exact)
    : nf_(std::move(nf)), i_(i_morse), rot_(std::move(rotation_exact)) {
  switch (nf_.kind) {
    case NormalCase::Case1:
      if (nf_.b < -1 || nf_.b > 1) throw Error(ErrorKind::InvalidInput, "case 1 needs b in {-1,0,1}");
      break;
    case NormalCase::Case3:
      if (nf_.b != 0 && nf_.b != 1) throw Error(ErrorKind::InvalidInput, "case 3 needs b in {0,1}");
      break;
    case NormalCase::Case2: {
      if (!rot_ && nf_.theta_over_pi) rot_ = QuadNumber(*nf_.theta_over_pi / 2);
      if (rot_) {
        if (rot_->sign() <= 0 || *rot_ >= QuadNumber(Rational(1)) || *rot_ == QuadNumber(make_rational(1, 2)))
          throw Error(ErrorKind::InvalidInput, "case 2 rotation must lie in (0,1) without 1/2");
        nf_.theta = 2.0 * kPi * rot_->to_double();
        if (rot_->is_rational()) nf_.theta_over_pi = rot_->rational_part() * 2;
      } else if (!(nf_.theta > 0.0 && nf_.theta < 2.0 * kPi) || std::abs(nf_.theta - kPi) < 1e-12) {
        throw Error(ErrorKind::InvalidInput, "case 2 angle out of range");
      }
      break;
    }
    default:
      break;
  }
}

IterationFormula IterationFormula::hyperbolic(int i_morse) {
  NormalFormSp4 nf;
  nf.kind = NormalCase::Hyperbolic;
  return {nf, i_morse};
}

IterationFormula IterationFormula::case1(int b, int i_morse) {
  NormalFormSp4 nf;
  nf.kind = NormalCase::Case1;
  nf.b = b;
  return {nf, i_morse};
}

IterationFormula IterationFormula::case2(const QuadNumber& theta_over_2pi, int i_morse) {
  NormalFormSp4 nf;
  nf.kind = NormalCase::Case2;
  return {nf, i_morse, theta_over_2pi};
}

IterationFormula IterationFormula::case3(int b, int i_morse) {
  NormalFormSp4 nf;
  nf.kind = NormalCase::Case3;
  nf.b = b;
  return {nf, i_morse};
}

IterationFormula IterationFormula::case4(int i_morse) {
  NormalFormSp4 nf;
  nf.kind = NormalCase::Case4;
  return {nf, i_morse};
}

long long IterationFormula::ceil_rotation(long long m) const {
  if (rot_) return static_cast<long long>((QuadNumber(Rational(m)) * *rot_).ceil());
  return static_cast<long long>(std::ceil(m * nf_.theta / (2.0 * kPi) - 1e-9));
}

long long IterationFormula::index(long long m) const {
  if (m < 1) throw Error(ErrorKind::InvalidInput, "iterates start at 1");
  const long long even = (m % 2 == 0) ? 1 : 0;
  switch (nf_.kind) {
    case NormalCase::Case1:
      return m * (i_ + 3) - 3 - (nf_.b == 1 ? 0 : even);
    case NormalCase::Case2:
      return m * (i_ + 2) + 2 * ceil_rotation(m) - 4;
    case NormalCase::Case3:
      return m * (i_ + 4) - 4;
    case NormalCase::Case4:
    case NormalCase::Hyperbolic:
      return m * (i_ + 3) - 3;
  }
  return 0;
}

int IterationFormula::nullity(long long m) const {
  if (m < 1) throw Error(ErrorKind::InvalidInput, "iterates start at 1");
  switch (nf_.kind) {
    case NormalCase::Case1:
      if (m % 2 == 1) return 1;
      return nf_.b == 0 ? 3 : 2;
    case NormalCase::Case2: {
      const long long k = degeneracy_period();
      return (k > 0 && m % k == 0) ? 3 : 1;
    }
    case NormalCase::Case3:
      return nf_.b == 0 ? 3 : 2;
    case NormalCase::Case4:
      return 2;
    case NormalCase::Hyperbolic:
      return 1;
  }
  return 1;
}

MeanIndex IterationFormula::mean() const {
  MeanIndex r;
  switch (nf_.kind) {
    case NormalCase::Case2:
      if (rot_) {
        r.exact = QuadNumber(Rational(i_ + 2)) + QuadNumber(Rational(2)) * *rot_;
      } else {
        r.is_exact = false;
        r.approx = i_ + 2 + nf_.theta / kPi;
        return r;
      }
      break;
    case NormalCase::Case3:
      r.exact = QuadNumber(Rational(i_ + 4));
      break;
    default:
      r.exact = QuadNumber(Rational(i_ + 3));
      break;
  }
  r.approx = r.exact.to_double();
  return r;
}

long long IterationFormula::degeneracy_period() const {
  switch (nf_.kind) {
    case NormalCase::Case1:
      return 2;
    case NormalCase::Case2:
      if (rot_) {
        if (!rot_->is_rational()) return 0;
        return static_cast<long long>(boost::multiprecision::denominator(rot_->rational_part()));
      }
      if (nf_.theta_over_pi) {
        const Rational half = *nf_.theta_over_pi / 2;
        return static_cast<long long>(boost::multiprecision::denominator(half));
      }
      return 0;
    default:
      return 1;
  }
}

int IterationFormula::splitting_plus() const {
  switch (nf_.kind) {
    case NormalCase::Case3: return 2;
    default: return 1;
  }
}

std::vector<SymmetricIterate> symmetric_iteration(const std::function<long long(long long)>& half_index, int max_m) {
  std::vector<SymmetricIterate> out;
  for (int m = 1; m <= max_m; m += 2) out.push_back({m, half_index(2LL * m) - half_index(m)});
  return out;
}

std::function<long long(long long)> hyperbolic_half_index(int i_psi) {
  return [i_psi](long long m) { return m * i_psi - (m % 2 == 0 ? 1 : 0); };
}

QuadNumber hyperbolic_symmetric_mean(int i_psi, int n) {
  const long long i_y = hyperbolic_half_index(i_psi)(2) - n;
  return QuadNumber(make_rational(i_y + 3, 2));
}

std::vector<IndexJump> find_index_jump(const std::vector<JumpRecord>& records, long long n_max) {
  if (records.empty() || n_max < 1) return {};
  struct Prepared {
    long long i1, nu1, s;
    std::map<long long, std::vector<long long>> by_value;  // i(y, 2m+1) → m
    const IterationFormula* f;
  };
  std::vector<Prepared> prep;
  for (const auto& r : records) {
    if (!r.splitting_plus) throw Error(ErrorKind::MissingSplittingNumber, "record lacks S+ at 1");
    const double ihat = r.formula.mean().value();
    if (!(ihat > 0.0)) throw Error(ErrorKind::InvalidInput, "index jumps need a positive mean index");
    Prepared p{r.formula.maslov(1), r.formula.nullity(1), *r.splitting_plus, {}, &r.formula};
    const long long n = r.formula.n();
    const long long m_max =
        static_cast<long long>(std::floor(((2.0 * n_max + p.i1 + n) / ihat - 1.0) / 2.0)) + 2;
    for (long long m = 1; m <= m_max; ++m) p.by_value[r.formula.maslov(2 * m + 1)].push_back(m);
    prep.push_back(std::move(p));
  }
  std::vector<IndexJump> out;
  for (long long big_n = 1; big_n <= n_max; ++big_n) {
    std::vector<std::vector<long long>> choices;
    for (const auto& p : prep) {
      std::vector<long long> ok;
      auto it = p.by_value.find(2 * big_n + p.i1);
      if (it != p.by_value.end()) {
        for (long long m : it->second) {
          const long long lhs = p.f->maslov(2 * m - 1) + p.f->nullity(2 * m - 1);
          if (lhs == 2 * big_n - (p.i1 + 2 * p.s - p.nu1)) ok.push_back(m);
        }
      }
      if (ok.empty()) break;
      choices.push_back(std::move(ok));
    }
    if (choices.size() != prep.size()) continue;
    std::vector<IndexJump> partial{{big_n, {}}};
    for (const auto& c : choices) {
      std::vector<IndexJump> next;
      for (const auto& pj : partial)
        for (long long m : c) {
          IndexJump j = pj;
          j.m.push_back(m);
          next.push_back(std::move(j));
        }
      partial = std::move(next);
    }
    out.insert(out.end(), partial.begin(), partial.end());
  }
  return out;
}

}  // namespace maslovkit
