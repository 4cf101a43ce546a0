#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "maslovkit/errors.hpp"
#include "maslovkit/io.hpp"
#include "maslovkit/pipeline.hpp"

using namespace maslovkit;

namespace {

std::string identity_row(double t) { return std::to_string(t) + ",1,0,0,1"; }

bool kind_is(ErrorKind k, const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind() == k;
  }
  return false;
}

}  // namespace

TEST_CASE("rational encoding") {
  CHECK(rational_json(make_rational(-3, 4)).dump() == R"({"num":-3,"den":4})");
  const Rational big = Rational(Integer("123456789012345678901234567890"));
  CHECK(rational_json(big)["num"] == "123456789012345678901234567890");
  CHECK(rational_json(big)["den"] == 1);
  CHECK(rational_from_json(rational_json(big)) == big);
  CHECK(rational_from_json(Json("5/6")) == make_rational(5, 6));
  CHECK(kind_is(ErrorKind::InvalidInput, [] { rational_from_json(Json::parse(R"({"num":1,"den":0})")); }));
  CHECK(kind_is(ErrorKind::InvalidInput, [] { rational_from_json(Json(0.5)); }));
}

TEST_CASE("quadratic numbers") {
  const QuadNumber q = quad_from_json(Json::parse(R"({"sqrt":2,"times":{"num":1,"den":2},"plus":3})"));
  CHECK(q == QuadNumber(Rational(3), make_rational(1, 2), 2));
  const Json j = quad_json(q);
  CHECK(j["radicand"] == 2);
  CHECK(j["approx"].get<double>() == doctest::Approx(3.7071067811865475));
  CHECK(quad_from_json(j) == q);
  CHECK(quad_from_json(Json(7)) == QuadNumber(Rational(7)));
  CHECK(quad_json(QuadNumber(make_rational(1, 2))).dump() == R"({"num":1,"den":2})");
  CHECK(kind_is(ErrorKind::InvalidInput, [] { quad_from_json(Json::parse(R"({"sqrt":-2})")); }));
}

TEST_CASE("path files") {
  const std::string good = "t,m00,m01,m10,m11\n" + identity_row(0) + "\n" + identity_row(0.5) + "\n";
  const SymplecticPath p = parse_path_csv(good);
  CHECK(p.times.size() == 2);
  CHECK(p.dim_half() == 1);

  CHECK(kind_is(ErrorKind::InvalidInput, [] { parse_path_csv(identity_row(0)); }));
  CHECK(kind_is(ErrorKind::InvalidInput, [] { parse_path_csv("0,1,0,0,1\n1,2,0,0,0.5\n0.5,1,0,0,1\n"); }));
  CHECK(kind_is(ErrorKind::InvalidInput, [] { parse_path_csv("0,2,0,0,0.5\n1,1,0,0,1\n"); }));
  CHECK(kind_is(ErrorKind::InvalidInput, [] { parse_path_csv("0.1,1,0,0,1\n1,1,0,0,1\n"); }));
  CHECK(kind_is(ErrorKind::InvalidInput, [] { parse_path_csv("0,1,0,0\n1,1,0,0\n"); }));
  CHECK(kind_is(ErrorKind::InvalidInput, [] { parse_path_csv("0,1,0,0,1\n1,1,0,0,1,0\n"); }));
  CHECK(kind_is(ErrorKind::InvalidInput, [] { parse_path_csv("0,1,0,0,1\n1,1,x,0,1\n"); }));
}

TEST_CASE("identity csv") {
  IdentityReport r;
  r.exact_sum = QuadNumber(make_rational(1, 2));
  r.target = make_rational(1, 2);
  r.pass = true;
  const std::string csv = identities_csv({r});
  CHECK(csv.find("identity,exact,sum") == 0);
  CHECK(csv.find("periodic_positive,true,1/2") != std::string::npos);
  CHECK(csv.find("PASS") != std::string::npos);
}

TEST_CASE("config parsing") {
  const Json base = Json::parse(R"({"schema_version":1,"surface":{"kind":"ellipsoid","radii_squared":[1,2]}})");
  const RunConfig cfg = parse_config(base);
  CHECK(cfg.checks == kAllChecks);
  CHECK(cfg.max_iterate == 64);

  Json unknown = base;
  unknown["surfce"] = 1;
  CHECK_THROWS_AS(parse_config(unknown), ConfigError);
  Json version = base;
  version["schema_version"] = 2;
  CHECK_THROWS_AS(parse_config(version), ConfigError);
  Json missing = base;
  missing.erase("schema_version");
  CHECK_NOTHROW(parse_config(missing));

  RunConfig over = cfg;
  Overrides o;
  o.checks = std::vector<std::string>{"bott"};
  o.max_iterate = 8;
  apply_overrides(over, o);
  CHECK(over.checks == std::vector<std::string>{"bott"});
  CHECK(over.max_iterate == 8);
  o.checks = std::vector<std::string>{"nonsense"};
  CHECK_THROWS_AS(apply_overrides(over, o), ConfigError);
}
