#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "maslovkit/errors.hpp"
#include "maslovkit/index.hpp"
#include "maslovkit/iteration.hpp"
#include "maslovkit/orbits.hpp"
#include "support.hpp"

#include <cmath>

using namespace maslovkit;
using testsupport::kPi;

namespace {

Mat random_symplectic(std::mt19937& rng) {
  return Mat((standard_j(2) * testsupport::random_symmetric(rng, 4, 0.4)).exp());
}

Mat conjugate(const Mat& m, const Mat& p) { return p.inverse() * m * p; }

// Direct check of the jump conditions for one record.
bool jump_holds(const IterationFormula& f, int s_plus, long long N, long long m) {
  const long long i1 = f.maslov(1);
  const long long nu1 = f.nullity(1);
  return f.maslov(2 * m + 1) == 2 * N + i1 &&
         f.maslov(2 * m - 1) + f.nullity(2 * m - 1) == 2 * N - (i1 + 2 * s_plus - nu1);
}

}  // namespace

TEST_CASE("normal form recognition") {
  std::mt19937 rng(5);
  const Mat p = random_symplectic(rng);

  const NormalFormSp4 c2 = recognize_normal_form(conjugate(diamond(jordan_block(1, 1), rotation(2 * kPi / 5)), p));
  CHECK(c2.kind == NormalCase::Case2);
  REQUIRE(c2.theta_over_pi);
  CHECK((*c2.theta_over_pi == make_rational(2, 5) || *c2.theta_over_pi == make_rational(8, 5)));
  REQUIRE(c2.witness);
  CHECK(c2.witness_residual < 1e-6);
  CHECK(symplectic_defect(*c2.witness) < 1e-6);

  const NormalFormSp4 c1 = recognize_normal_form(conjugate(diamond(jordan_block(1, 1), jordan_block(-1, -1)), p));
  CHECK(c1.kind == NormalCase::Case1);
  CHECK(c1.b == -1);

  const NormalFormSp4 h = recognize_normal_form(diamond(jordan_block(1, 1), (Mat(2, 2) << 3, 0, 0, 1.0 / 3).finished()));
  CHECK(h.kind == NormalCase::Hyperbolic);
  CHECK_FALSE(h.negative_hyperbolic);

  CHECK_THROWS_AS(recognize_normal_form(Mat(diamond(rotation(0.7), rotation(1.1)))), Error);
}

TEST_CASE("ellipsoid orbit is case 2 with the radius ratio") {
  const auto orbits = ellipsoid_orbits(GaugeSurface::ellipsoid({1.0, 1.6}));
  const NormalFormSp4 nf = recognize_normal_form(orbits[0].monodromy);
  CHECK(nf.kind == NormalCase::Case2);
  const double frac = 1.0 / (1.6 * 1.6);
  const double rho = nf.theta / (2 * kPi);
  CHECK((std::abs(rho - frac) < 1e-6 || std::abs(rho - (1 - frac)) < 1e-6));
}

TEST_CASE("iteration sequences") {
  const IterationFormula h = IterationFormula::hyperbolic(-1);
  CHECK(h.index(1) == -1);
  CHECK(h.index(2) == 1);
  CHECK(h.index(3) == 3);
  CHECK(h.index(4) == 5);
  CHECK(h.mean().exact == QuadNumber(Rational(2)));

  const IterationFormula c2 = IterationFormula::case2(QuadNumber(make_rational(1, 3)), -2);
  for (int m = 1; m <= 3; ++m) CHECK(c2.index(m) == -2);
  CHECK(c2.nullity(3) == 3);
  CHECK(c2.nullity(2) == 1);
  CHECK(c2.degeneracy_period() == 3);

  CHECK(IterationFormula::case3(1, -2).index(2) == 0);
  CHECK(IterationFormula::case3(1, -2).splitting_plus() == 2);
  CHECK(IterationFormula::case1(-1, 0).nullity(2) == 2);
  CHECK(IterationFormula::case1(0, 0).nullity(2) == 3);
  CHECK_THROWS_AS(h.index(0), Error);
}

TEST_CASE("case 2 mean index and degeneracy lattice") {
  for (int p = 1; p <= 6; ++p)
    for (int q = p + 1; q <= 7; ++q) {
      const Rational rho = make_rational(p, q);
      if (denominator(rho) != q || q == 2) continue;
      const IterationFormula f = IterationFormula::case2(QuadNumber(rho), 1);
      const QuadNumber excess = f.mean().exact - QuadNumber(Rational(3));
      CHECK(excess == QuadNumber(2 * rho));
      // θ/π ≥ 2/K where K is the degeneracy period.
      CHECK(2 * rho >= make_rational(2, f.degeneracy_period()));
      for (int m = 1; m <= 2 * q; ++m) CHECK(f.nullity(m) == (m % q == 0 ? 3 : 1));
    }
  const QuadNumber irr(Rational(0), make_rational(1, 2), 2);
  CHECK(IterationFormula::case2(irr, 0).degeneracy_period() == 0);
}

TEST_CASE("formula agrees with the index engine") {
  for (const std::vector<double>& r2 : {std::vector<double>{1.0, 1.6}, std::vector<double>{1.0, std::sqrt(3.0)},
                                        std::vector<double>{1.0, 2.7}}) {
    const auto orbits = ellipsoid_orbits(GaugeSurface::ellipsoid(r2));
    for (const auto& o : orbits) {
      IndexOptions opts;
      opts.max_iterate = 8;
      const IndexRecord rec = index_record(o, opts);
      const IterationFormula f(recognize_normal_form(o.monodromy), rec.iterates[0].maslov - 2);
      for (const auto& e : rec.iterates) {
        CAPTURE(e.m);
        CHECK(f.index(e.m) == e.maslov - 2);
        CHECK(f.nullity(e.m) == e.nullity);
      }
    }
  }

  const SymplecticPath full = iterate_path(testsupport::hyperbolic_half_path(300), 2);
  const auto table = iterate_indices(full, 8);
  const IterationFormula f(recognize_normal_form(full.end()), table[0].maslov - 2);
  CHECK(f.kind() == NormalCase::Hyperbolic);
  for (const auto& e : table) CHECK(f.index(e.m) == e.maslov - 2);
}

TEST_CASE("symmetric iteration") {
  const auto half = hyperbolic_half_index(1);
  const auto odd = symmetric_iteration(half, 5);
  REQUIRE(odd.size() == 3);
  CHECK(odd[0].index == 0);
  CHECK(hyperbolic_symmetric_mean(1) == QuadNumber(Rational(1)));
  for (const auto& s : odd) CHECK((s.index - odd[0].index) % 2 == 0);

  // Engine half-path table on an ellipsoid symmetric orbit.
  const std::vector<double> r2{1.0, 1.6};
  const std::vector<double> radii{1.0, std::sqrt(1.6)};
  for (int j = 0; j < 2; ++j) {
    const SymplecticPath psi = ellipsoid_path(radii, j, kPi * r2[j], 300);
    const auto table = iterate_indices(psi, 10);
    const auto sym = symmetric_iteration([&](long long m) { return static_cast<long long>(table[m - 1].maslov); }, 5);
    for (const auto& s : sym) CHECK(s.index == omega_index(iterate_path(psi, static_cast<int>(s.m)), -1.0));
  }
}

TEST_CASE("index jumps") {
  const std::vector<JumpRecord> pair{{IterationFormula::hyperbolic(0), 1},
                                     {IterationFormula::hyperbolic(1), 1}};
  const auto jumps = find_index_jump(pair, 100);
  REQUIRE_FALSE(jumps.empty());
  for (const auto& j : jumps) {
    CHECK(j.N <= 100);
    for (std::size_t k = 0; k < pair.size(); ++k)
      CHECK(jump_holds(pair[k].formula, pair[k].formula.splitting_plus(), j.N, j.m[k]));
  }

  const QuadNumber rho(Rational(0), make_rational(1, 2), 2);
  const std::vector<JumpRecord> single{{IterationFormula::case2(rho, 0), 1}};
  const auto many = find_index_jump(single, 100);
  CHECK(many.size() >= 3);
  for (const auto& j : many) CHECK(jump_holds(single[0].formula, 1, j.N, j.m[0]));

  // Brute force over the same range finds exactly the reported triples.
  std::size_t brute = 0;
  for (long long N = 1; N <= 100; ++N)
    for (long long a = 1; a <= 200; ++a)
      for (long long b = 1; b <= 200; ++b)
        if (jump_holds(pair[0].formula, 1, N, a) && jump_holds(pair[1].formula, 1, N, b)) ++brute;
  CHECK(brute == jumps.size());

  CHECK(find_index_jump({}, 100).empty());
  CHECK_THROWS_AS(find_index_jump({{IterationFormula::hyperbolic(0), std::nullopt}}, 10), Error);
}
