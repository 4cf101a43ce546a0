#include "maslovkit/resonance.hpp"

#include "maslovkit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace maslovkit {
namespace {

int parity_sign(long long v) { return (v % 2 == 0) ? 1 : -1; }

void require_valid(const IterateTypeNumbers& it) {
  const auto v = validate_type_numbers(it.k, it.nullity);
  if (!v.empty())
    throw Error(ErrorKind::InvalidTypeNumbers, "rule (" + v.front().rule + "): " + v.front().detail);
}

long long alternating_sum(const IterateTypeNumbers& it) {
  long long s = 0;
  for (std::size_t l = 0; l < it.k.size(); ++l) s += parity_sign(it.index + static_cast<long long>(l)) * it.k[l];
  return s;
}

std::string render(const MeanValue& v) {
  if (v.exact) return v.exact->to_string();
  return "[" + to_string(v.bracket.lo) + ", " + to_string(v.bracket.hi) + "]";
}

MeanValue halve(const MeanValue& v) {
  if (v.exact) return MeanValue::of(symmetric_mean_index(*v.exact));
  return MeanValue::of(symmetric_mean_index(v.bracket));
}

struct Entry {
  std::string id;
  MeanValue mean;
  std::optional<Rational> chi;
  bool nondegenerate;
};

bool admissible(const QuadNumber& v, bool nondegenerate, bool symmetric) {
  if (!v.is_rational()) return false;
  const Rational r = v.rational_part();
  if (!nondegenerate) return r >= -1 && r <= 1;
  if (r == 1 || r == -1) return true;
  return !symmetric && (r == make_rational(1, 2) || r == make_rational(-1, 2));
}

IdentityReport evaluate(IdentityId id, const Rational& target, const std::vector<Entry>& entries, double tol,
                        bool symmetric) {
  IdentityReport rep;
  rep.id = id;
  rep.target = target;
  rep.tolerance = tol;

  const Entry* unknown = nullptr;
  for (const auto& e : entries) {
    if (!e.chi) {
      if (unknown) throw Error(ErrorKind::InvalidInput, "at most one unknown Euler characteristic per identity");
      unknown = &e;
    }
  }
  bool all_exact = std::all_of(entries.begin(), entries.end(), [](const Entry& e) { return e.mean.exact.has_value(); });

  if (all_exact) {
    try {
      QuadNumber sum;
      for (const auto& e : entries) {
        if (!e.chi) {
          rep.terms.push_back({e.id, "unknown/" + e.mean.exact->to_string()});
          continue;
        }
        const QuadNumber term = QuadNumber(*e.chi) / *e.mean.exact;
        sum += term;
        rep.terms.push_back({e.id, term.to_string()});
      }
      if (unknown) {
        const QuadNumber forced = (QuadNumber(target) - sum) * *unknown->mean.exact;
        rep.forced = ForcedValue{unknown->id, forced, admissible(forced, unknown->nondegenerate, symmetric)};
        sum = QuadNumber(target);
      }
      rep.exact = true;
      rep.exact_sum = sum;
      rep.lo = rep.hi = sum.to_double();
      rep.residual = std::abs((sum - QuadNumber(target)).to_double());
      rep.pass = sum == QuadNumber(target) && (!rep.forced || rep.forced->admissible);
      return rep;
    } catch (const std::domain_error&) {
      rep.terms.clear();  // mixed quadratic fields: fall back to floating intervals
    }
  }
  if (unknown) throw Error(ErrorKind::InvalidInput, "unknown Euler characteristics need exact mean indices");

  rep.exact = false;
  double lo = 0.0, hi = 0.0;
  for (const auto& e : entries) {
    const double chi = to_double(*e.chi);
    const double a = chi / e.mean.lo(), b = chi / e.mean.hi();
    lo += std::min(a, b);
    hi += std::max(a, b);
    rep.terms.push_back({e.id, to_string(*e.chi) + "/" + render(e.mean)});
  }
  rep.lo = lo;
  rep.hi = hi;
  const double t = to_double(target);
  rep.residual = std::abs(0.5 * (lo + hi) - t);
  rep.pass = lo - 1e-12 <= t && t <= hi + 1e-12 && rep.residual <= tol;
  return rep;
}

}  // namespace

std::vector<TypeNumberViolation> validate_type_numbers(const std::vector<int>& k, int nullity) {
  std::vector<TypeNumberViolation> out;
  if (nullity < 1) {
    out.push_back({"support", "nullity must be at least 1"});
    return out;
  }
  auto at = [&](int l) { return (l >= 0 && l < static_cast<int>(k.size())) ? k[l] : 0; };
  for (std::size_t l = 0; l < k.size(); ++l) {
    if (k[l] < 0) out.push_back({"negative", "k_" + std::to_string(l) + " < 0"});
    if (static_cast<int>(l) >= nullity && k[l] != 0)
      out.push_back({"support", "k_" + std::to_string(l) + " outside [0, nu-1]"});
  }
  const int top = nullity - 1;
  if (at(0) > 1) out.push_back({"endpoint", "k_0 must be 0 or 1"});
  if (top > 0 && at(top) > 1) out.push_back({"endpoint", "k_{nu-1} must be 0 or 1"});
  if (at(0) == 1)
    for (int l = 1; l <= top; ++l)
      if (at(l) != 0) out.push_back({"i", "k_0 = 1 forces k_" + std::to_string(l) + " = 0"});
  if (top > 0 && at(top) == 1)
    for (int l = 0; l < top; ++l)
      if (at(l) != 0) out.push_back({"ii", "k_{nu-1} = 1 forces k_" + std::to_string(l) + " = 0"});
  for (int l = 1; l <= top - 1; ++l)
    if (at(l) >= 1 && (at(0) != 0 || at(top) != 0))
      out.push_back({"iii", "k_" + std::to_string(l) + " >= 1 forces k_0 = k_{nu-1} = 0"});
  if (nullity <= 3) {
    int nonzero = 0;
    for (int l = 0; l <= top; ++l) nonzero += at(l) != 0;
    if (nonzero > 1) out.push_back({"iv", "at most one non-zero type number when nu <= 3"});
  }
  return out;
}

std::vector<int> nondegenerate_type_numbers(long long i_m, long long i_1) {
  return {parity_sign(i_m - i_1) == 1 ? 1 : 0};
}

Rational euler_hat(long long i_y, bool jump_even) {
  const Rational s(parity_sign(i_y));
  return jump_even ? s : s / 2;
}

Rational euler_hat(const std::vector<IterateTypeNumbers>& one_period) {
  if (one_period.empty()) throw Error(ErrorKind::InvalidTypeNumbers, "empty type-number period");
  long long sum = 0;
  for (const auto& it : one_period) {
    require_valid(it);
    sum += alternating_sum(it);
  }
  return Rational(sum) / static_cast<long long>(one_period.size());
}

Rational euler_hat_symmetric(long long ibar) { return Rational(parity_sign(ibar)); }

Rational euler_hat_symmetric(const std::vector<IterateTypeNumbers>& odd_iterates) {
  if (odd_iterates.empty()) throw Error(ErrorKind::InvalidTypeNumbers, "empty type-number period");
  long long sum = 0;
  for (const auto& it : odd_iterates) {
    require_valid(it);
    sum += alternating_sum(it);
  }
  // K̄ = 2 × (number of odd iterates per period), so 2/K̄ = 1/count.
  return Rational(sum) / static_cast<long long>(odd_iterates.size());
}

int MeanValue::sign() const {
  if (exact) return exact->sign();
  if (bracket.lo > 0) return 1;
  if (bracket.hi < 0) return -1;
  if (bracket.lo == 0 && bracket.hi == 0) return 0;
  throw Error(ErrorKind::SignAmbiguous, "mean-index bracket contains 0");
}

double MeanValue::lo() const { return exact ? exact->to_double() : to_double(bracket.lo); }
double MeanValue::hi() const { return exact ? exact->to_double() : to_double(bracket.hi); }

std::string to_string(IdentityId id) {
  switch (id) {
    case IdentityId::PeriodicPositive: return "periodic_positive";
    case IdentityId::PeriodicNegative: return "periodic_negative";
    case IdentityId::SymmetricPositive: return "symmetric_positive";
    case IdentityId::SymmetricNegative: return "symmetric_negative";
  }
  return "periodic_positive";
}

std::vector<IdentityReport> identity_sums(const std::vector<OrbitInvariants>& orbits, const IdentityTolerances& tol) {
  std::vector<Entry> pos, neg, spos, sneg;
  bool any_symmetric = false;
  for (const auto& o : orbits) {
    const int s = o.ihat.sign();
    if (s == 0) throw Error(ErrorKind::InvalidInput, "orbit " + o.id + " has zero mean index");
    (s > 0 ? pos : neg).push_back({o.id, o.ihat, o.chi_hat, o.nondegenerate});
    if (!o.symmetric) continue;
    any_symmetric = true;
    const MeanValue ib = o.ibar_hat ? *o.ibar_hat : halve(o.ihat);
    const int sb = ib.sign();
    if (sb == 0) throw Error(ErrorKind::InvalidInput, "orbit " + o.id + " has zero symmetric mean index");
    (sb > 0 ? spos : sneg).push_back({o.id, ib, o.chibar_hat, o.symmetric_nondegenerate});
  }
  std::vector<IdentityReport> out;
  out.push_back(evaluate(IdentityId::PeriodicPositive, make_rational(1, 2), pos, tol.periodic, false));
  out.push_back(evaluate(IdentityId::PeriodicNegative, Rational(0), neg, tol.periodic, false));
  if (any_symmetric) {
    out.push_back(evaluate(IdentityId::SymmetricPositive, Rational(1), spos, tol.symmetric, true));
    out.push_back(evaluate(IdentityId::SymmetricNegative, Rational(0), sneg, tol.symmetric, true));
  }
  return out;
}

MorseOrbit morse_orbit(const std::string& id, const IterationFormula& f,
                       const std::map<long long, std::vector<int>>& degenerate_k) {
  MorseOrbit o;
  o.id = id;
  o.n = f.n();
  o.mean = f.mean().value();
  o.index = [f](long long m) { return f.index(m); };
  o.type_numbers = [f, degenerate_k, id](long long m) {
    const int nu = f.nullity(m);
    if (nu == 1) return nondegenerate_type_numbers(f.index(m), f.index(1));
    const long long period = f.degeneracy_period();
    const long long key = period > 0 ? ((m - 1) % period) + 1 : m;
    auto it = degenerate_k.find(key);
    if (it == degenerate_k.end())
      throw Error(ErrorKind::InvalidTypeNumbers,
                  "orbit " + id + ": no type numbers supplied for degenerate iterate " + std::to_string(m));
    require_valid({f.index(m), nu, it->second});
    return it->second;
  };
  return o;
}

MorseOrbit symmetric_morse_orbit(const std::string& id, std::function<long long(long long)> ibar, double ibar_hat,
                                 int n) {
  MorseOrbit o;
  o.id = id;
  o.n = n;
  o.mean = ibar_hat;
  o.index = std::move(ibar);
  o.type_numbers = [](long long) { return std::vector<int>{1}; };
  return o;
}

long long MorseSeries::at(int h) const {
  auto it = coefficients.find(h);
  return it == coefficients.end() ? 0 : it->second;
}

MorseSeries morse_series(const std::vector<MorseOrbit>& orbits, int window, bool symmetric) {
  if (window < 0) throw Error(ErrorKind::InvalidInput, "window must be non-negative");
  MorseSeries s;
  s.window = window;
  s.symmetric = symmetric;
  s.lowest = std::numeric_limits<long long>::max();
  const long long step = symmetric ? 2 : 1;
  constexpr long long kCap = 1000000;
  for (const auto& o : orbits) {
    const long long slack = 2LL * o.n;
    if (std::abs(o.mean) < 1e-12) {
      for (long long m = 1; m <= 1 + 8 * step; m += step)
        if (std::llabs(o.index(m)) <= window)
          throw Error(ErrorKind::UnboundedContribution, "orbit " + o.id + " has zero mean index and lands in the window");
      continue;
    }
    for (long long m = 1; m <= kCap; m += step) {
      const double guess = m * o.mean;
      if (o.mean > 0 && guess - slack > window) break;
      if (o.mean < 0 && guess + slack < -window - slack) {
        s.lowest = std::min(s.lowest, static_cast<long long>(std::floor(guess)));
        break;
      }
      const long long idx = o.index(m);
      const auto k = o.type_numbers(m);
      for (std::size_t l = 0; l < k.size(); ++l) {
        if (k[l] == 0) continue;
        const long long h = idx + static_cast<long long>(l);
        s.lowest = std::min(s.lowest, h);
        s.any = true;
        if (std::llabs(h) <= window) s.coefficients[static_cast<int>(h)] += k[l];
      }
    }
  }
  if (!s.any) s.lowest = 0;
  return s;
}

MorseVerdict morse_inequality_check(const MorseSeries& series, int n) {
  const int w = series.window;
  if (w < 4 * n) throw Error(ErrorKind::TruncationTooTight, "window narrower than 4n");
  if (series.any && series.lowest < -w)
    throw Error(ErrorKind::TruncationTooTight, "contribution at " + std::to_string(series.lowest) + " lies below the window");
  MorseVerdict v;
  if (series.coefficients.empty()) {
    v.vacuous = true;
    v.note = "empty series: the -1/(1-t^2) term is not matched by any orbit";
    return v;
  }
  long long prev = 0;
  for (int h = -w; h <= w; ++h) {
    const long long c = series.at(h) - ((h >= 0 && h % 2 == 0) ? 1 : 0);
    const long long u = c - prev;
    v.u[h] = u;
    if (u < 0) v.negative_u.push_back(h);
    prev = u;
  }
  const int p = series.coefficients.begin()->first;
  if (p < 0) {
    v.lowest_negative = p;
    v.monotone_violation = series.at(p + 1) < series.at(p);
  }
  v.pass = v.negative_u.empty() && !v.monotone_violation;
  if (v.monotone_violation)
    v.note = "m_" + std::to_string(p + 1) + " = " + std::to_string(series.at(p + 1)) + " < m_" + std::to_string(p) +
             " = " + std::to_string(series.at(p));
  else if (!v.negative_u.empty())
    v.note = "negative U coefficient at degree " + std::to_string(v.negative_u.front());
  return v;
}

}  // namespace maslovkit
