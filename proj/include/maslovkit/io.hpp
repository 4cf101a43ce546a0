#pragma once

#include "maslovkit/exact.hpp"
#include "maslovkit/flow.hpp"
#include "maslovkit/index.hpp"
#include "maslovkit/iteration.hpp"
#include "maslovkit/orbits.hpp"
#include "maslovkit/resonance.hpp"

#include <json.hpp>

#include <string>

namespace maslovkit {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

Json rational_json(const Rational& r);  // {"num", "den"}
/// Rationals as {"num", "den"}; irrationals as {"rational", "radical",
/// "radicand", "approx"}.
Json quad_json(const QuadNumber& q);
Json to_json(const Mat& m);  // row-major nested arrays
Json to_json(const Vec& v);
Json to_json(const RationalInterval& r);

/// Accepts an integer, {"num", "den"}, {"sqrt": d} or the QuadNumber form.
/// Throws InvalidInput.
QuadNumber quad_from_json(const Json& j);
Rational rational_from_json(const Json& j);

Json to_json(const ClosedCharacteristic& orbit, const StabilityClass& stability);
Json to_json(const IndexRecord& rec);
Json to_json(const IterationFormula& f, int table_length);
Json to_json(const IdentityReport& rep);
Json to_json(const MorseSeries& s, const MorseVerdict& v);
Json to_json(const IndexJump& jump);

/// Rows "t, m_11, m_12, ..." with a 2n × 2n matrix per row. Throws
/// InvalidInput on malformed text, on non-increasing times and when the
/// first matrix is not the identity.
SymplecticPath parse_path_csv(const std::string& text);

std::string identities_csv(const std::vector<IdentityReport>& reports);

std::string read_file(const std::string& path);   // throws InvalidInput
void write_file(const std::string& path, const std::string& text);

}  // namespace maslovkit
