#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "maslovkit/errors.hpp"
#include "maslovkit/flow.hpp"
#include "maslovkit/orbits.hpp"

#include <cmath>

using namespace maslovkit;

namespace {

constexpr double kTwoPi = 6.283185307179586;

Vec vec4(double a, double b, double c, double d) { return (Vec(4) << a, b, c, d).finished(); }

}  // namespace

TEST_CASE("sphere orbit closes after one period") {
  const GaugeSurface s = make_custom_surface("round_sphere", 2);
  const Vec y0 = vec4(1, 0, 0, 0);
  const Trajectory tr = integrate_flow(s, y0, kTwoPi);
  CHECK((tr.states.back() - y0).norm() <= 1e-8);
  // Closed form on the sphere: y(t) = e^{tJ} y0.
  const std::size_t mid = tr.times.size() / 2;
  CHECK((tr.states[mid] - rotation_all(2, tr.times[mid]) * y0).norm() <= 1e-8);
}

TEST_CASE("the gauge is a first integral") {
  for (const auto& id : registered_custom_surfaces()) {
    const GaugeSurface s = make_custom_surface(id, 2);
    Vec y0 = vec4(0.3, 0.8, -0.4, 0.2);
    y0 /= gauge_eval(s, y0);
    const Trajectory tr = integrate_flow(s, y0, 9.0);
    CHECK(tr.max_drift() <= 1e-8);
  }
}

TEST_CASE("ellipsoid plane circles stay in their plane") {
  const GaugeSurface s = GaugeSurface::ellipsoid({1.0, std::sqrt(2.0)});
  const Vec y0 = vec4(1, 0, 0, 0);
  const Trajectory tr = integrate_flow(s, y0, kTwoPi);
  double off = 0.0;
  for (const auto& y : tr.states) off = std::max({off, std::abs(y(1)), std::abs(y(3))});
  CHECK(off <= 1e-8);
}

TEST_CASE("sphere monodromy is unipotent") {
  const GaugeSurface s = make_custom_surface("round_sphere", 2);
  const SymplecticPath p = monodromy_path(s, vec4(1, 0, 0, 0), kTwoPi, PathSpan::whole());
  CHECK(p.max_symplectic_drift() <= 1e-8);
  for (const auto& lam : sorted_eigenvalues(p.end())) CHECK(std::abs(lam - 1.0) <= 1e-6);
  CHECK(unit_multiplicity(p.end()) == 4);
}

TEST_CASE("flow map derivative has the semigroup property") {
  const GaugeSurface s = GaugeSurface::ellipsoid({1.0, 1.3});
  const Vec y0 = vec4(1, 0, 0, 0);
  const double tau = kTwoPi;
  const Mat one = flow_with_derivative(s, y0, tau).dy;
  Mat power = Mat::Identity(4, 4);
  for (int m = 1; m <= 4; ++m) {
    power = one * power;
    CHECK((flow_with_derivative(s, y0, m * tau).dy - power).cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("integrated ellipsoid monodromy matches the closed form") {
  const std::vector<double> radii{1.0, std::pow(2.0, 0.25)};
  const GaugeSurface s = GaugeSurface::ellipsoid(radii);
  const double tau = kTwoPi;
  const SymplecticPath p = monodromy_path(s, vec4(1, 0, 0, 0), tau, PathSpan::whole());
  CHECK((p.end() - ellipsoid_monodromy(radii, 0, tau)).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK(p.max_symplectic_drift() <= 1e-8);

  // Transverse block turns by 2π r_1²/r_2² = 2π/√2.
  const double rho = 1.0 / std::sqrt(2.0);
  int at_one = 0;
  bool found = false;
  for (const auto& lam : sorted_eigenvalues(p.end())) {
    if (std::abs(lam - 1.0) < 1e-5) {
      ++at_one;
      continue;
    }
    double a = std::arg(lam) / kTwoPi;
    if (a < 0) a += 1.0;
    found = found || std::abs(a - rho) < 1e-8 || std::abs(a - (1 - rho)) < 1e-8;
  }
  CHECK(at_one == 2);
  CHECK(found);

  // Monodromy commutes with the plane projectors.
  Mat proj = Mat::Zero(4, 4);
  proj(0, 0) = proj(2, 2) = 1.0;
  CHECK((p.end() * proj - proj * p.end()).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("half path squares to the full monodromy") {
  const GaugeSurface s = GaugeSurface::ellipsoid({1.0, 1.3});
  const Vec y0 = vec4(0, 1.3, 0, 0);
  const double tau = kTwoPi * 1.69;
  const SymplecticPath half = monodromy_path(s, y0, tau, PathSpan::half_period());
  const SymplecticPath full = monodromy_path(s, y0, tau, PathSpan::whole());
  CHECK((half.end() * half.end() - full.end()).cwiseAbs().maxCoeff() <= 1e-6);
  CHECK(half.max_symplectic_drift() <= 1e-8);
}

TEST_CASE("iterated paths") {
  const SymplecticPath one = ellipsoid_path({1.0, 1.3}, 1, kTwoPi * 1.69, 200);
  const SymplecticPath three = iterate_path(one, 3);
  CHECK(three.duration() == doctest::Approx(3 * one.duration()));
  CHECK((three.end() - one.end() * one.end() * one.end()).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("central symmetry of orbits") {
  SUBCASE("ellipsoid circles are symmetric") {
    CHECK(check_symmetric(GaugeSurface::ellipsoid({1.0, 1.3}), vec4(1, 0, 0, 0), kTwoPi));
  }
  SUBCASE("orbit on a translated ellipsoid is not") {
    Vec c = Vec::Zero(4);
    c(0) = 0.1;
    const GaugeSurface s = GaugeSurface::custom(2, "shifted", make_shifted_ellipsoid_gauge({1.0, 1.3}, c));
    const ClosedCharacteristic orbit = shoot_orbit(s, vec4(1.1, 0, 0, 0), kTwoPi);
    CHECK_FALSE(orbit.symmetric);
    CHECK_FALSE(check_symmetric(s, orbit.y0, orbit.period));
  }
  SUBCASE("the criterion is invariant under y -> -y") {
    const GaugeSurface s = make_custom_surface("quartic_symmetric", 2);
    Vec y = vec4(1, 0, 0, 0);
    y /= gauge_eval(s, y);
    const ClosedCharacteristic orbit = shoot_orbit(s, y, kTwoPi);
    CHECK(check_symmetric(s, orbit.y0, orbit.period) == check_symmetric(s, -orbit.y0, orbit.period));
    CHECK(orbit.symmetric);
  }
}

TEST_CASE("half path of a non-symmetric orbit is rejected") {
  Vec c = Vec::Zero(4);
  c(0) = 0.1;
  const GaugeSurface s = GaugeSurface::custom(2, "shifted", make_shifted_ellipsoid_gauge({1.0, 1.3}, c));
  const ClosedCharacteristic orbit = shoot_orbit(s, vec4(1.1, 0, 0, 0), kTwoPi);
  CHECK_THROWS_AS(monodromy_path(s, orbit.y0, orbit.period, PathSpan::half_period()), Error);
}

TEST_CASE("CSV export") {
  const GaugeSurface s = GaugeSurface::ellipsoid({1.0, 1.3});
  FlowOptions o;
  o.samples = 10;
  const Trajectory tr = integrate_flow(s, vec4(1, 0, 0, 0), 1.0, o);
  const std::string csv = trajectory_csv(tr);
  CHECK(csv.rfind("t,y1,y2,y3,y4\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(tr.times.size()) + 1);
  const std::string pcsv = path_csv(ellipsoid_path({1.0, 1.3}, 0, 1.0, 4));
  CHECK(pcsv.rfind("t,m1_1,", 0) == 0);
}
