#include "maslovkit/io.hpp"

#include "maslovkit/errors.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace maslovkit {
namespace {

Rational parse_rational_text(const std::string& s) {
  try {
    return Rational(s);
  } catch (const std::exception&) {
    throw Error(ErrorKind::InvalidInput, "not a rational: " + s);
  }
}

}  // namespace

Json rational_json(const Rational& r) {
  Json j;
  auto put = [](const Integer& v) {
    if (v >= std::numeric_limits<long long>::min() && v <= std::numeric_limits<long long>::max())
      return Json(static_cast<long long>(v));
    return Json(v.str());  // beyond 64 bits
  };
  j["num"] = put(numerator(r));
  j["den"] = put(denominator(r));
  return j;
}

Json quad_json(const QuadNumber& q) {
  if (q.is_rational()) return rational_json(q.rational_part());
  Json j;
  j["rational"] = rational_json(q.rational_part());
  j["radical"] = rational_json(q.radical_part());
  j["radicand"] = q.radicand();
  j["approx"] = q.to_double();
  return j;
}

Json to_json(const Mat& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(row);
  }
  return rows;
}

Json to_json(const Vec& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Json to_json(const RationalInterval& r) { return Json{{"lo", rational_json(r.lo)}, {"hi", rational_json(r.hi)}}; }

Rational rational_from_json(const Json& j) {
  if (j.is_number_integer()) return Rational(j.get<long long>());
  if (j.is_string()) return parse_rational_text(j.get<std::string>());
  if (j.is_object() && j.contains("num") && j.contains("den")) {
    auto part = [](const Json& v) { return v.is_string() ? v.get<std::string>() : std::to_string(v.get<long long>()); };
    const Rational den = parse_rational_text(part(j["den"]));
    if (den == 0) throw Error(ErrorKind::InvalidInput, "zero denominator");
    return parse_rational_text(part(j["num"])) / den;
  }
  throw Error(ErrorKind::InvalidInput, "expected an exact rational, got " + j.dump());
}

QuadNumber quad_from_json(const Json& j) {
  if (j.is_object() && j.contains("sqrt")) {
    const long long d = j["sqrt"].get<long long>();
    if (d <= 0) throw Error(ErrorKind::InvalidInput, "sqrt of a non-positive integer");
    const Rational coeff = j.contains("times") ? rational_from_json(j["times"]) : Rational(1);
    const Rational shift = j.contains("plus") ? rational_from_json(j["plus"]) : Rational(0);
    return QuadNumber(shift, coeff, d);
  }
  if (j.is_object() && j.contains("radicand"))
    return QuadNumber(rational_from_json(j["rational"]), rational_from_json(j["radical"]), j["radicand"].get<long long>());
  return QuadNumber(rational_from_json(j));
}

Json to_json(const ClosedCharacteristic& orbit, const StabilityClass& stability) {
  Json j;
  j["period"] = orbit.period;
  if (orbit.period_over_2pi) j["period_over_2pi"] = quad_json(*orbit.period_over_2pi);
  j["symmetric"] = orbit.symmetric;
  j["prime"] = orbit.prime;
  if (orbit.plane >= 0) j["plane"] = orbit.plane;
  j["y0"] = to_json(orbit.y0);
  Json mult = Json::array();
  for (const auto& z : stability.multipliers) mult.push_back({z.real(), z.imag()});
  j["multipliers"] = mult;
  j["angles"] = stability.angles;
  j["stability"] = to_string(stability.kind);
  j["monodromy"] = to_json(orbit.monodromy);
  return j;
}

Json to_json(const IndexRecord& rec) {
  Json j;
  j["n"] = rec.n;
  j["i1"] = rec.i1;
  j["nu1"] = rec.nu1;
  j["im1"] = rec.im1 ? Json(*rec.im1) : Json(nullptr);
  j["num1"] = rec.num1 ? Json(*rec.num1) : Json(nullptr);
  Json it = Json::array();
  for (const auto& e : rec.iterates) it.push_back({e.m, e.maslov, e.nullity});
  j["iterates"] = it;
  if (rec.mean_exact)
    j["mean"] = quad_json(*rec.mean_exact);
  else
    j["mean"] = Json::array({rational_json(rec.mean_bracket.lo), rational_json(rec.mean_bracket.hi)});
  j["mean_bracket"] = to_json(rec.mean_bracket);
  return j;
}

Json to_json(const IterationFormula& f, int table_length) {
  Json j;
  const auto& nf = f.normal_form();
  j["case"] = to_string(f.kind());
  Json params;
  switch (f.kind()) {
    case NormalCase::Case1:
    case NormalCase::Case3: params["b"] = nf.b; break;
    case NormalCase::Case2:
      params["theta"] = nf.theta;
      if (nf.theta_over_pi) params["theta_over_pi"] = rational_json(*nf.theta_over_pi);
      break;
    case NormalCase::Hyperbolic: params["negative"] = nf.negative_hyperbolic; break;
    case NormalCase::Case4: break;
  }
  j["params"] = params;
  j["i1"] = f.i1();
  const MeanIndex mean = f.mean();
  j["mean"] = mean.is_exact ? quad_json(mean.exact) : Json(mean.approx);
  j["degeneracy_period"] = f.degeneracy_period();
  j["splitting_plus"] = f.splitting_plus();
  Json table = Json::array();
  for (int m = 1; m <= table_length; ++m) table.push_back({m, f.index(m), f.nullity(m)});
  j["table"] = table;
  if (nf.witness) j["witness_residual"] = nf.witness_residual;
  return j;
}

Json to_json(const IdentityReport& rep) {
  Json j;
  j["identity"] = to_string(rep.id);
  j["exact"] = rep.exact;
  if (rep.exact) j["sum"] = quad_json(rep.exact_sum);
  j["interval"] = {rep.lo, rep.hi};
  j["target"] = rational_json(rep.target);
  j["residual"] = rep.residual;
  j["tolerance"] = rep.tolerance;
  j["verdict"] = rep.pass ? "PASS" : "FAIL";
  Json terms = Json::array();
  for (const auto& t : rep.terms) terms.push_back({{"orbit", t.orbit}, {"value", t.value}});
  j["terms"] = terms;
  if (rep.forced)
    j["forced"] = {{"orbit", rep.forced->orbit},
                   {"value", quad_json(rep.forced->value)},
                   {"admissible", rep.forced->admissible}};
  j["orbit_set_completeness_assumed"] = rep.completeness_caveat;
  return j;
}

Json to_json(const MorseSeries& s, const MorseVerdict& v) {
  Json j;
  j["window"] = {-s.window, s.window};
  j["symmetric"] = s.symmetric;
  Json coeff = Json::array();
  for (int h = -s.window; h <= s.window; ++h) coeff.push_back({h, s.at(h)});
  j["coefficients"] = coeff;
  Json u = Json::array();
  for (const auto& [h, c] : v.u) u.push_back({h, c});
  j["u"] = u;
  j["negative_u"] = v.negative_u;
  j["lowest_negative"] = v.lowest_negative ? Json(*v.lowest_negative) : Json(nullptr);
  j["monotone_violation"] = v.monotone_violation;
  j["vacuous"] = v.vacuous;
  j["note"] = v.note;
  j["window_semantics"] = "all iterates whose index lands in the window";
  j["verdict"] = v.pass ? "PASS" : "FAIL";
  return j;
}

Json to_json(const IndexJump& jump) { return Json{{"N", jump.N}, {"m", jump.m}}; }

SymplecticPath parse_path_csv(const std::string& text) {
  SymplecticPath p;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  int dim = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line[0] == '#') continue;
    std::vector<double> vals;
    std::istringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) {
      try {
        std::size_t used = 0;
        vals.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        if (p.times.empty() && line_no == 1) {  // header row
          vals.clear();
          break;
        }
        throw Error(ErrorKind::InvalidInput, "line " + std::to_string(line_no) + ": bad number '" + cell + "'");
      }
    }
    if (vals.empty()) continue;
    const int entries = static_cast<int>(vals.size()) - 1;
    const int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(std::max(entries, 0)))));
    if (entries <= 0 || d * d != entries || d % 2 != 0)
      throw Error(ErrorKind::InvalidInput, "line " + std::to_string(line_no) + ": expected t and a 2n x 2n matrix");
    if (dim < 0) dim = d;
    if (d != dim) throw Error(ErrorKind::InvalidInput, "line " + std::to_string(line_no) + ": dimension changes");
    if (!p.times.empty() && !(vals[0] > p.times.back()))
      throw Error(ErrorKind::InvalidInput, "line " + std::to_string(line_no) + ": times must increase");
    Mat m(d, d);
    for (int i = 0; i < d; ++i)
      for (int k = 0; k < d; ++k) m(i, k) = vals[1 + i * d + k];
    p.times.push_back(vals[0]);
    p.matrices.push_back(m);
  }
  if (p.times.size() < 2) throw Error(ErrorKind::InvalidInput, "path needs at least two samples");
  if (std::abs(p.times.front()) > 1e-12) throw Error(ErrorKind::InvalidInput, "path must start at t = 0");
  if (max_abs(p.matrices.front() - Mat::Identity(dim, dim)) > 1e-8)
    throw Error(ErrorKind::InvalidInput, "path must start at the identity");
  return p;
}

std::string identities_csv(const std::vector<IdentityReport>& reports) {
  std::ostringstream out;
  out.precision(17);
  out << "identity,exact,sum,lo,hi,target,residual,tolerance,verdict\n";
  for (const auto& r : reports) {
    out << to_string(r.id) << ',' << (r.exact ? "true" : "false") << ','
        << (r.exact ? r.exact_sum.to_string() : std::string()) << ',' << r.lo << ',' << r.hi << ','
        << to_string(r.target) << ',' << r.residual << ',' << r.tolerance << ',' << (r.pass ? "PASS" : "FAIL")
        << '\n';
  }
  return out.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::InvalidInput, "cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::InvalidInput, "cannot write " + path);
  out << text;
}

}  // namespace maslovkit
