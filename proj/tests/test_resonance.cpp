#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "maslovkit/errors.hpp"
#include "maslovkit/resonance.hpp"

#include <cmath>

using namespace maslovkit;

namespace {

OrbitInvariants invariants(const std::string& id, const MeanValue& ihat, std::optional<Rational> chi,
                           bool symmetric = false) {
  OrbitInvariants o;
  o.id = id;
  o.ihat = ihat;
  o.chi_hat = chi;
  o.symmetric = symmetric;
  if (symmetric) o.chibar_hat = Rational(1);
  return o;
}

const IdentityReport& find(const std::vector<IdentityReport>& r, IdentityId id) {
  for (const auto& x : r)
    if (x.id == id) return x;
  FAIL("identity missing");
  return r.front();
}

long long ceil_ll(double x) { return static_cast<long long>(std::ceil(x - 1e-12)); }

}  // namespace

TEST_CASE("type number validation") {
  CHECK(validate_type_numbers({0, 1, 0}, 3).empty());
  const auto bad = validate_type_numbers({1, 1, 0}, 3);
  REQUIRE_FALSE(bad.empty());
  CHECK(bad.front().rule == "i");
  CHECK(validate_type_numbers({1}, 1).empty());
  CHECK_FALSE(validate_type_numbers({0, 0, 0, 1}, 3).empty());
  CHECK_FALSE(validate_type_numbers({-1}, 1).empty());
  CHECK(nondegenerate_type_numbers(3, 1) == std::vector<int>{1});
  CHECK(nondegenerate_type_numbers(2, 1) == std::vector<int>{0});
}

TEST_CASE("average Euler characteristics") {
  CHECK(euler_hat(-1, true) == Rational(-1));
  CHECK(euler_hat(2, false) == make_rational(1, 2));
  CHECK(euler_hat_symmetric(0) == Rational(1));
  CHECK(euler_hat_symmetric(3) == Rational(-1));

  // Degenerate case 2 with K = 3 and i(yᵐ) = 2E(m/3) − 4.
  std::vector<IterateTypeNumbers> data;
  for (long long m = 1; m <= 3; ++m) {
    const long long i = 2 * ceil_ll(m / 3.0) - 4;
    data.push_back({i, m == 3 ? 3 : 1, m == 3 ? std::vector<int>{0, 1, 0} : nondegenerate_type_numbers(i, -2)});
  }
  Rational direct(0);
  for (const auto& d : data)
    for (std::size_t l = 0; l < d.k.size(); ++l) direct += Rational(((d.index + l) % 2 == 0 ? 1 : -1) * d.k[l]);
  direct /= 3;
  CHECK(euler_hat(data) == direct);
  CHECK(direct == make_rational(1, 3));

  data[2].k = {1, 1, 0};
  CHECK_THROWS_AS(euler_hat(data), Error);

  const std::vector<IterateTypeNumbers> sym{{0, 1, {1}}, {1, 1, {1}}};
  CHECK(euler_hat_symmetric(sym) == Rational(0));
}

TEST_CASE("identities on the rational ellipsoid") {
  const std::vector<OrbitInvariants> orbits{invariants("y1", MeanValue::of(QuadNumber(Rational(3))), Rational(1), true),
                                            invariants("y2", MeanValue::of(QuadNumber(Rational(6))), Rational(1), true)};
  const auto reps = identity_sums(orbits);
  const auto& pos = find(reps, IdentityId::PeriodicPositive);
  CHECK(pos.exact);
  CHECK(pos.exact_sum == QuadNumber(make_rational(1, 2)));
  CHECK(pos.residual == 0.0);
  CHECK(pos.pass);
  const auto& neg = find(reps, IdentityId::PeriodicNegative);
  CHECK(neg.terms.empty());
  CHECK(neg.pass);
  const auto& sym = find(reps, IdentityId::SymmetricPositive);
  CHECK(sym.exact_sum == QuadNumber(Rational(1)));
  CHECK(sym.pass);
  CHECK(pos.completeness_caveat);
}

TEST_CASE("identities on an irrational ellipsoid") {
  const QuadNumber s2(Rational(0), Rational(1), 2);
  const QuadNumber two(Rational(2));
  const std::vector<OrbitInvariants> orbits{invariants("y1", MeanValue::of(two + s2), Rational(1), true),
                                            invariants("y2", MeanValue::of(two + two * s2), Rational(1), true)};
  const auto reps = identity_sums(orbits);
  CHECK(find(reps, IdentityId::PeriodicPositive).exact_sum == QuadNumber(make_rational(1, 2)));
  CHECK(find(reps, IdentityId::SymmetricPositive).exact_sum == QuadNumber(Rational(1)));
  for (const auto& r : reps) CHECK(r.pass);
}

TEST_CASE("identities from brackets") {
  const std::vector<OrbitInvariants> orbits{
      invariants("y1", MeanValue::of(RationalInterval{make_rational(47, 16), make_rational(49, 16)}), Rational(1)),
      invariants("y2", MeanValue::of(RationalInterval{make_rational(95, 16), make_rational(97, 16)}), Rational(1))};
  const auto reps = identity_sums(orbits);
  const auto& pos = find(reps, IdentityId::PeriodicPositive);
  CHECK_FALSE(pos.exact);
  CHECK(pos.lo <= 0.5);
  CHECK(pos.hi >= 0.5);
  CHECK(pos.pass);

  const std::vector<OrbitInvariants> straddle{
      invariants("y", MeanValue::of(RationalInterval{make_rational(-1, 8), make_rational(1, 8)}), Rational(1))};
  CHECK_THROWS_AS(identity_sums(straddle), Error);
}

TEST_CASE("forced values") {
  const std::vector<OrbitInvariants> ok{invariants("y1", MeanValue::of(QuadNumber(Rational(3))), Rational(1)),
                                        invariants("y2", MeanValue::of(QuadNumber(Rational(6))), std::nullopt)};
  const auto ra = identity_sums(ok);
  const auto& a = find(ra, IdentityId::PeriodicPositive);
  REQUIRE(a.forced);
  CHECK(a.forced->orbit == "y2");
  CHECK(a.forced->value == QuadNumber(Rational(1)));
  CHECK(a.forced->admissible);
  CHECK(a.pass);

  const std::vector<OrbitInvariants> bad{invariants("y1", MeanValue::of(QuadNumber(Rational(2))), Rational(1)),
                                         invariants("y2", MeanValue::of(QuadNumber(Rational(4))), std::nullopt)};
  const auto rb = identity_sums(bad);
  const auto& b = find(rb, IdentityId::PeriodicPositive);
  REQUIRE(b.forced);
  CHECK(b.forced->value == QuadNumber(Rational(0)));
  CHECK_FALSE(b.forced->admissible);
  CHECK_FALSE(b.pass);
}

TEST_CASE("Morse series of a hyperbolic orbit") {
  const MorseSeries s = morse_series({morse_orbit("y", IterationFormula::hyperbolic(-1))}, 12);
  for (int h = -12; h <= 12; ++h) CHECK(s.at(h) == ((h >= -1 && (h % 2 != 0)) ? 1 : 0));
  CHECK(morse_series({}, 8).any == false);
}

TEST_CASE("Morse series of an ellipsoid pair") {
  const double r2[2] = {1.0, std::sqrt(2.0)};
  std::vector<MorseOrbit> orbits;
  for (int j = 0; j < 2; ++j) {
    MorseOrbit o;
    o.id = "y" + std::to_string(j + 1);
    o.index = [j, r2](long long m) {
      long long total = -2;
      for (double rk : r2) total += 2 * ceil_ll(m * r2[j] / rk) - 1;
      return total;
    };
    o.type_numbers = [](long long) { return std::vector<int>{1}; };
    o.mean = 2.0 * (r2[j] / r2[0] + r2[j] / r2[1]);
    orbits.push_back(o);
  }
  const MorseSeries s = morse_series(orbits, 8);
  for (int h = -8; h <= 8; ++h) {
    long long count = 0;
    for (const auto& o : orbits)
      for (long long m = 1; m <= 40; ++m) count += o.index(m) == h ? 1 : 0;
    CAPTURE(h);
    CHECK(s.at(h) == count);
  }
  const MorseVerdict v = morse_inequality_check(s);
  CHECK(v.pass);
  CHECK(v.negative_u.empty());
}

TEST_CASE("Morse inequality failures") {
  MorseSeries s;
  s.window = 8;
  s.coefficients = {{-2, 1}};
  s.lowest = -2;
  s.any = true;
  const MorseVerdict v = morse_inequality_check(s);
  CHECK_FALSE(v.pass);
  CHECK(v.monotone_violation);
  REQUIRE(v.lowest_negative);
  CHECK(*v.lowest_negative == -2);

  MorseSeries empty;
  empty.window = 8;
  const MorseVerdict e = morse_inequality_check(empty);
  CHECK(e.pass);
  CHECK(e.vacuous);
  CHECK_FALSE(e.note.empty());

  MorseSeries narrow;
  narrow.window = 4;
  CHECK_THROWS_AS(morse_inequality_check(narrow), Error);
}

TEST_CASE("degenerate lowest iterate with a hyperbolic partner") {
  const std::vector<MorseOrbit> orbits{
      morse_orbit("y1", IterationFormula::case1(-1, -2), {{2, {1, 0}}}),
      morse_orbit("y2", IterationFormula::hyperbolic(1))};
  const MorseSeries s = morse_series(orbits, 8);
  CHECK(s.at(-2) >= 1);
  CHECK(s.at(-1) == 0);
  const MorseVerdict v = morse_inequality_check(s);
  CHECK_FALSE(v.pass);
  CHECK(v.monotone_violation);
}

TEST_CASE("zero mean index contributes without bound") {
  MorseOrbit flat;
  flat.id = "z";
  flat.index = [](long long) { return 0LL; };
  flat.type_numbers = [](long long) { return std::vector<int>{1}; };
  flat.mean = 0.0;
  CHECK_THROWS_AS(morse_series({flat}, 8), Error);
}
