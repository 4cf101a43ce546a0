#include "maslovkit/pipeline.hpp"

#include "maslovkit/errors.hpp"
#include "maslovkit/flow.hpp"
#include "maslovkit/index.hpp"
#include "maslovkit/iteration.hpp"
#include "maslovkit/surface.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <iostream>
#include <thread>

namespace maslovkit {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// ---------------------------------------------------------------- config

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

void only_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
  require(j.is_object(), where + " must be an object");
  for (const auto& [k, v] : j.items()) require(allowed.count(k) > 0, "unknown key '" + k + "' in " + where);
}

double positive(const Json& j, const std::string& name) {
  require(j.is_number(), name + " must be a number");
  const double v = j.get<double>();
  require(v > 0.0 && std::isfinite(v), name + " must be positive");
  return v;
}

NormalCase parse_case(const std::string& s) {
  if (s == "hyperbolic") return NormalCase::Hyperbolic;
  if (s == "case1") return NormalCase::Case1;
  if (s == "case2") return NormalCase::Case2;
  if (s == "case3") return NormalCase::Case3;
  if (s == "case4") return NormalCase::Case4;
  throw ConfigError("unknown case '" + s + "'");
}

// "unknown" (or null) asks the identity engine to solve for the value.
std::optional<Rational> optional_rational(const Json& j) {
  if (j.is_null() || (j.is_string() && j.get<std::string>() == "unknown")) return std::nullopt;
  return rational_from_json(j);
}

FormulaRecord parse_record(const Json& j, std::size_t pos) {
  only_keys(j,
            {"id", "case", "b", "theta_over_2pi", "i", "chi_hat", "type_numbers", "splitting_plus", "symmetric",
             "ibar", "i_psi", "ibar_hat", "chibar_hat", "symmetric_nondegenerate"},
            "formula record");
  FormulaRecord r;
  r.id = j.value("id", "y" + std::to_string(pos + 1));
  require(j.contains("case") && j["case"].is_string(), "record " + r.id + " needs a case");
  r.kind = parse_case(j["case"].get<std::string>());
  require(j.contains("i") && j["i"].is_number_integer(), "record " + r.id + " needs an integer index i");
  r.i1 = j["i"].get<int>();
  r.b = j.value("b", 0);
  if (r.kind == NormalCase::Case2) {
    require(j.contains("theta_over_2pi"), "case 2 record " + r.id + " needs theta_over_2pi");
    r.rotation = quad_from_json(j["theta_over_2pi"]);
  }
  if (j.contains("chi_hat")) {
    r.chi_given = true;
    r.chi_hat = optional_rational(j["chi_hat"]);
  }
  if (j.contains("type_numbers")) {
    for (const auto& [k, v] : j["type_numbers"].items()) {
      long long m = 0;
      try {
        m = std::stoll(k);
      } catch (const std::exception&) {
        throw ConfigError("type_numbers keys must be iterate numbers");
      }
      require(m >= 1, "type_numbers keys must be positive");
      r.type_numbers[m] = v.get<std::vector<int>>();
    }
  }
  if (j.contains("splitting_plus")) r.splitting_plus = j["splitting_plus"].get<int>();
  r.symmetric = j.value("symmetric", false);
  if (j.contains("ibar")) r.ibar = j["ibar"].get<int>();
  if (j.contains("i_psi")) {
    require(r.kind == NormalCase::Hyperbolic, "i_psi is only defined for hyperbolic records");
    r.i_psi = j["i_psi"].get<int>();
  }
  if (j.contains("ibar_hat")) r.ibar_hat = quad_from_json(j["ibar_hat"]);
  if (j.contains("chibar_hat")) {
    r.chibar_given = true;
    r.chibar_hat = optional_rational(j["chibar_hat"]);
  }
  r.symmetric_nondegenerate = j.value("symmetric_nondegenerate", true);
  if (r.symmetric) require(r.ibar || r.i_psi, "symmetric record " + r.id + " needs ibar or i_psi");
  return r;
}

GaugeSurface build_surface(const Json& j) {
  only_keys(j, {"kind", "radii", "radii_squared", "id", "n"}, "surface");
  const std::string kind = j.value("kind", "");
  if (kind == "ellipsoid") {
    if (j.contains("radii_squared")) {
      std::vector<QuadNumber> r2;
      for (const auto& v : j["radii_squared"]) {
        r2.push_back(v.is_number_float() ? throw ConfigError("radii_squared entries must be exact") : quad_from_json(v));
        require(r2.back().sign() > 0, "squared radii must be positive");
      }
      require(r2.size() >= 1, "ellipsoid needs radii");
      return GaugeSurface::ellipsoid_exact(r2);
    }
    require(j.contains("radii") && j["radii"].is_array() && !j["radii"].empty(), "ellipsoid needs radii");
    std::vector<double> radii;
    for (const auto& v : j["radii"]) radii.push_back(positive(v, "radius"));
    return GaugeSurface::ellipsoid(radii);
  }
  if (kind == "custom") {
    require(j.contains("id") && j["id"].is_string(), "custom surface needs an id");
    const int n = j.value("n", 2);
    require(n >= 1, "custom surface needs n >= 1");
    try {
      return make_custom_surface(j["id"].get<std::string>(), n);
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  }
  throw ConfigError("surface kind must be 'ellipsoid' or 'custom'");
}

// ---------------------------------------------------------------- parallel

template <class F>
void parallel_for(std::size_t count, F&& body) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(thread_cap()));
  std::vector<std::exception_ptr> errors(count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            body(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    for (auto& t : pool) t.join();
  }
  // First failure in input order, so error reports do not depend on scheduling.
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// ---------------------------------------------------------------- per-orbit data

struct Computed {
  ClosedCharacteristic orbit;
  StabilityClass stability;
  IndexRecord record;
  std::optional<IndexRecord> refined;
  std::vector<IterateEntry> half_iterates;  // i₁(ψᵏ), k = 1..
  BottResidual bott;
  std::optional<int> s_plus_limit;
  std::string formula_note;
};

struct OrbitEntry {
  std::string id;
  int n = 2;
  std::optional<Computed> computed;
  std::optional<IterationFormula> formula;
  std::optional<FormulaRecord> record;
  std::optional<QuadNumber> mean_exact;
  RationalInterval mean_bracket;
  bool has_bracket = false;

  // Morse index i(yᵐ).
  long long index(long long m) const {
    if (computed && m <= static_cast<long long>(computed->record.iterates.size()))
      return computed->record.iterates[m - 1].maslov - n;
    if (formula) return formula->index(m);
    throw Error(ErrorKind::InvalidInput, "orbit " + id + ": iterate " + std::to_string(m) +
                                             " is beyond the computed table; raise max_iterate");
  }
  int nullity(long long m) const {
    if (computed && m <= static_cast<long long>(computed->record.iterates.size()))
      return computed->record.iterates[m - 1].nullity;
    if (formula) return formula->nullity(m);
    throw Error(ErrorKind::InvalidInput, "orbit " + id + ": iterate " + std::to_string(m) + " is beyond the table");
  }
  double mean_value() const {
    if (mean_exact) return mean_exact->to_double();
    return 0.5 * (to_double(mean_bracket.lo) + to_double(mean_bracket.hi));
  }
  bool symmetric() const {
    if (computed) return computed->orbit.symmetric;
    return record && record->symmetric;
  }
  // ī(yᵐ) for odd m, when derivable.
  std::optional<std::function<long long(long long)>> symmetric_index_fn() const {
    if (computed && computed->orbit.symmetric && !computed->half_iterates.empty()) {
      const auto half = computed->half_iterates;
      const std::string name = id;
      return [half, name](long long m) -> long long {
        if (2 * m > static_cast<long long>(half.size()))
          throw Error(ErrorKind::InvalidInput,
                      "orbit " + name + ": symmetric iterate " + std::to_string(m) + " beyond the half-path table");
        return half[2 * m - 1].maslov - half[m - 1].maslov;
      };
    }
    if (record && record->symmetric && record->i_psi) {
      const auto half = hyperbolic_half_index(*record->i_psi);
      return [half](long long m) { return half(2 * m) - half(m); };
    }
    return std::nullopt;
  }
  std::optional<long long> ibar() const {
    if (computed && computed->record.im1) return *computed->record.im1;
    if (record && record->ibar) return *record->ibar;
    if (auto f = symmetric_index_fn()) return (*f)(1);
    return std::nullopt;
  }
};

// θ/2π of a closed-form ellipsoid orbit, oriented to match the recognised angle.
std::optional<QuadNumber> ellipsoid_rotation(const ClosedCharacteristic& orbit, double theta) {
  const auto& r2 = orbit.surface.radii_squared_exact();
  if (!r2 || orbit.plane < 0 || r2->size() != 2) return std::nullopt;
  const QuadNumber ratio = (*r2)[orbit.plane] / (*r2)[1 - orbit.plane];
  QuadNumber frac = ratio - QuadNumber(Rational(ratio.floor()));
  if (frac.sign() == 0) return std::nullopt;
  if (std::abs(kTwoPi * frac.to_double() - theta) > 1e-6) frac = QuadNumber(Rational(1)) - frac;
  if (std::abs(kTwoPi * frac.to_double() - theta) > 1e-6) return std::nullopt;
  return frac;
}

Computed compute_orbit(const ClosedCharacteristic& orbit, const RunConfig& cfg, bool need_formula) {
  Computed c;
  c.orbit = orbit;
  c.stability = classify_stability(orbit.monodromy, cfg.thresholds);
  IndexOptions io;
  io.max_iterate = cfg.max_iterate;
  io.alpha = cfg.alpha;
  io.flow = cfg.flow;
  c.record = index_record(orbit, io);
  const int n = orbit.surface.dim_half();
  const int samples =
      cfg.flow.samples > 0 ? cfg.flow.samples : default_samples(orbit.surface, orbit.y0, orbit.period, cfg.alpha);
  auto path_at = [&](PathSpan span, int s) {
    FlowOptions o = cfg.flow;
    o.samples = s;
    return orbit_path(orbit, span, o, cfg.alpha);
  };
  const SymplecticPath one = path_at(PathSpan::whole(), samples);
  c.bott = bott_check(one);
  if (cfg.refinement) {
    FlowOptions fine = cfg.flow;
    fine.samples = 2 * samples;
    IndexOptions io2 = io;
    io2.flow = fine;
    c.refined = index_record(orbit, io2);
  }
  if (orbit.symmetric) {
    const int half_samples = std::max(64, samples / 2);
    const int count = 2 * static_cast<int>(c.record.iterates.size());
    c.half_iterates = iterate_indices(path_at(PathSpan::half_period(), half_samples), count);
  }
  if (need_formula && n == 2) {
    try {
      c.s_plus_limit = splitting_number(one, 1.0).plus;
    } catch (const Error& e) {
      c.formula_note = e.what();
    }
  } else if (need_formula) {
    c.formula_note = "closed-form iteration formulas are available for n = 2 only";
  }
  return c;
}

std::optional<IterationFormula> formula_for(const Computed& c, const RunConfig& cfg) {
  if (c.orbit.surface.dim_half() != 2 || !c.formula_note.empty()) return std::nullopt;
  RecognitionOptions ro;
  ro.thresholds = cfg.thresholds;
  const NormalFormSp4 nf = recognize_normal_form(c.orbit.monodromy, ro);
  std::optional<QuadNumber> rot;
  if (nf.kind == NormalCase::Case2) rot = ellipsoid_rotation(c.orbit, nf.theta);
  return IterationFormula(nf, c.record.i1 - 2, rot);
}

IterationFormula formula_from_record(const FormulaRecord& r) {
  switch (r.kind) {
    case NormalCase::Hyperbolic: return IterationFormula::hyperbolic(r.i1);
    case NormalCase::Case1: return IterationFormula::case1(r.b, r.i1);
    case NormalCase::Case2: return IterationFormula::case2(*r.rotation, r.i1);
    case NormalCase::Case3: return IterationFormula::case3(r.b, r.i1);
    case NormalCase::Case4: return IterationFormula::case4(r.i1);
  }
  return IterationFormula::hyperbolic(r.i1);
}

// ---------------------------------------------------------------- invariants

bool all_nondegenerate(const OrbitEntry& e) {
  if (e.formula) {
    const long long k = e.formula->degeneracy_period();
    const long long upto = k == 0 ? 2 : std::max<long long>(k, 2);
    for (long long m = 1; m <= upto; ++m)
      if (e.formula->nullity(m) != 1) return false;
    return true;
  }
  for (const auto& it : e.computed->record.iterates)
    if (it.nullity != 1) return false;
  return true;
}

std::optional<Rational> chi_hat_of(const OrbitEntry& e) {
  if (e.record && e.record->chi_given) return e.record->chi_hat;
  if (all_nondegenerate(e)) return euler_hat(e.index(1), (e.index(2) - e.index(1)) % 2 == 0);
  if (e.formula && e.record && !e.record->type_numbers.empty()) {
    const long long k = e.formula->degeneracy_period();
    std::vector<IterateTypeNumbers> period;
    for (long long m = 1; m <= k; ++m) {
      IterateTypeNumbers it{e.index(m), e.nullity(m), {}};
      if (it.nullity == 1) {
        it.k = nondegenerate_type_numbers(it.index, e.index(1));
      } else {
        auto f = e.record->type_numbers.find(m);
        if (f == e.record->type_numbers.end())
          throw ConfigError("orbit " + e.id + ": type numbers missing for iterate " + std::to_string(m));
        it.k = f->second;
      }
      period.push_back(it);
    }
    return euler_hat(period);
  }
  return std::nullopt;  // degenerate without type numbers: solved for by the identity
}

OrbitInvariants invariants_of(const OrbitEntry& e, bool numeric) {
  OrbitInvariants o;
  o.id = e.id;
  const bool use_exact = e.mean_exact && !numeric;
  o.ihat = use_exact ? MeanValue::of(*e.mean_exact) : MeanValue::of(e.mean_bracket);
  o.chi_hat = chi_hat_of(e);
  o.nondegenerate = all_nondegenerate(e);
  o.symmetric = e.symmetric();
  if (!o.symmetric) return o;
  if (e.record && e.record->ibar_hat && !numeric) o.ibar_hat = MeanValue::of(*e.record->ibar_hat);
  if (e.record) {
    o.symmetric_nondegenerate = e.record->symmetric_nondegenerate;
    if (e.record->chibar_given)
      o.chibar_hat = e.record->chibar_hat;
    else if (o.symmetric_nondegenerate)
      o.chibar_hat = euler_hat_symmetric(*e.ibar());
  } else {
    const auto& rec = e.computed->record;
    o.symmetric_nondegenerate = rec.num1 && *rec.num1 == 1;
    if (o.symmetric_nondegenerate) o.chibar_hat = euler_hat_symmetric(*rec.im1);
  }
  return o;
}

Json config_echo(const RunConfig& cfg) {
  Json j;
  if (!cfg.surface.is_null()) j["surface"] = cfg.surface;
  j["source"] = cfg.source == OrbitSource::ClosedForm ? "closed_form"
                : cfg.source == OrbitSource::Shooting ? "shooting"
                                                      : "formulas";
  j["max_iterate"] = cfg.max_iterate;
  j["window"] = {-cfg.window, cfg.window};
  j["alpha"] = cfg.alpha;
  j["tolerances"] = {{"periodic", cfg.identity_tol.periodic},
                     {"symmetric", cfg.identity_tol.symmetric},
                     {"on_circle", cfg.thresholds.on_circle},
                     {"at_one", cfg.thresholds.at_one},
                     {"off_circle", cfg.thresholds.off_circle}};
  j["checks"] = cfg.checks;
  j["jump_n_max"] = cfg.jump_n_max;
  j["refinement"] = cfg.refinement;
  return j;
}

std::vector<OrbitEntry> build_entries(const RunConfig& cfg, bool need_formula) {
  std::vector<OrbitEntry> entries;
  if (cfg.source == OrbitSource::Formulas) {
    for (const auto& r : cfg.records) {
      OrbitEntry e;
      e.id = r.id;
      e.record = r;
      try {
        e.formula = formula_from_record(r);
      } catch (const Error& err) {
        throw ConfigError("record " + r.id + ": " + err.what());
      }
      const MeanIndex mi = e.formula->mean();
      if (!mi.is_exact) throw ConfigError("record " + r.id + ": mean index is not exact");
      e.mean_exact = mi.exact;
      entries.push_back(std::move(e));
    }
    return entries;
  }
  const GaugeSurface surface = build_surface(cfg.surface);
  std::vector<ClosedCharacteristic> orbits;
  std::vector<std::string> ids;
  if (cfg.source == OrbitSource::ClosedForm) {
    if (!surface.is_ellipsoid()) throw ConfigError("closed-form orbits need an ellipsoid surface");
    orbits = ellipsoid_orbits(surface, cfg.alpha);
    for (std::size_t k = 0; k < orbits.size(); ++k) ids.push_back("y" + std::to_string(k + 1));
  } else {
    orbits.resize(cfg.seeds.size());
    for (const auto& s : cfg.seeds) {
      if (s.y0.size() != surface.dim()) throw ConfigError("seed " + s.id + " has the wrong dimension");
      ids.push_back(s.id);
    }
    ShootOptions so;
    so.alpha = cfg.alpha;
    parallel_for(cfg.seeds.size(),
                 [&](std::size_t i) { orbits[i] = shoot_orbit(surface, cfg.seeds[i].y0, cfg.seeds[i].period, so); });
  }
  std::vector<Computed> computed(orbits.size());
  parallel_for(orbits.size(), [&](std::size_t i) { computed[i] = compute_orbit(orbits[i], cfg, need_formula); });
  for (std::size_t i = 0; i < orbits.size(); ++i) {
    OrbitEntry e;
    e.id = ids[i];
    e.n = surface.dim_half();
    if (need_formula) {
      try {
        e.formula = formula_for(computed[i], cfg);
      } catch (const Error& err) {
        computed[i].formula_note = err.what();
      }
    }
    e.mean_exact = computed[i].record.mean_exact;
    e.mean_bracket = computed[i].record.mean_bracket;
    e.has_bracket = true;
    e.computed = std::move(computed[i]);
    entries.push_back(std::move(e));
  }
  return entries;
}

bool wants(const RunConfig& cfg, const std::string& c) {
  return std::find(cfg.checks.begin(), cfg.checks.end(), c) != cfg.checks.end();
}

// ---------------------------------------------------------------- checks

Json check_indices(const std::vector<OrbitEntry>& entries, bool& pass) {
  Json j;
  Json per = Json::array();
  bool ok = true;
  for (const auto& e : entries) {
    Json o;
    o["orbit"] = e.id;
    const int bound = 2 * e.n;
    long long worst = 0;
    int checked = 0;
    const int count = e.computed ? static_cast<int>(e.computed->record.iterates.size()) : 64;
    const double mean = e.mean_value();
    bool bound_ok = true;
    for (int m = 1; m <= count; ++m) {
      const long long i = e.index(m);
      if (e.mean_exact) {
        const QuadNumber gap = QuadNumber(Rational(i)) - QuadNumber(Rational(m)) * *e.mean_exact;
        if (gap > QuadNumber(Rational(bound)) || gap < QuadNumber(Rational(-bound))) bound_ok = false;
      } else if (std::abs(static_cast<double>(i) - m * mean) > bound + 1e-9) {
        bound_ok = false;
      }
      worst = std::max<long long>(worst, std::llabs(std::llround(static_cast<double>(i) - m * mean)));
      ++checked;
    }
    o["iterates_checked"] = checked;
    o["max_deviation"] = worst;
    o["bound"] = bound;
    o["index_bound"] = bound_ok;
    ok = ok && bound_ok;
    if (e.computed) {
      if (e.computed->refined) {
        const auto& a = e.computed->record;
        const auto& b = *e.computed->refined;
        bool same = a.iterates.size() == b.iterates.size() && a.im1 == b.im1 && a.num1 == b.num1;
        for (std::size_t m = 0; same && m < a.iterates.size(); ++m)
          same = a.iterates[m].maslov == b.iterates[m].maslov && a.iterates[m].nullity == b.iterates[m].nullity;
        o["refinement_stable"] = same;
        ok = ok && same;
      }
      if (e.formula) {
        bool agree = true;
        for (const auto& it : e.computed->record.iterates)
          agree = agree && e.formula->index(it.m) == it.maslov - e.n && e.formula->nullity(it.m) == it.nullity;
        o["formula_agreement"] = agree;
        ok = ok && agree;
      }
    }
    per.push_back(o);
  }
  j["orbits"] = per;
  j["verdict"] = ok ? "PASS" : "FAIL";
  pass = ok;
  return j;
}

Json check_bott(const std::vector<OrbitEntry>& entries, bool& pass) {
  Json per = Json::array();
  bool ok = true;
  for (const auto& e : entries) {
    if (!e.computed) continue;
    const auto& c = *e.computed;
    Json o;
    o["orbit"] = e.id;
    o["doubled"] = c.bott.doubled;
    o["split"] = c.bott.split;
    bool good = c.bott.holds();
    if (c.orbit.symmetric && c.half_iterates.size() >= 2 && c.record.im1) {
      const int diff = c.half_iterates[1].maslov - c.half_iterates[0].maslov;
      o["half_path_difference"] = diff;
      o["ibar"] = *c.record.im1;
      o["i_psi_squared"] = c.half_iterates[1].maslov;
      good = good && diff == *c.record.im1 && c.half_iterates[1].maslov == c.record.i1;
    }
    o["holds"] = good;
    ok = ok && good;
    per.push_back(o);
  }
  Json j;
  j["orbits"] = per;
  if (per.empty()) j["note"] = "no sampled paths (formula records only)";
  j["verdict"] = ok ? "PASS" : "FAIL";
  pass = ok;
  return j;
}

Json identities_json(const std::vector<IdentityReport>& reps, bool& pass) {
  Json a = Json::array();
  for (const auto& r : reps) {
    a.push_back(to_json(r));
    pass = pass && r.pass;
  }
  return a;
}

Json check_morse(const std::vector<OrbitEntry>& entries, const RunConfig& cfg, bool& pass) {
  const int n = entries.empty() ? 2 : entries.front().n;
  Json j;
  std::vector<MorseOrbit> periodic;
  for (const auto& e : entries) {
    MorseOrbit o;
    o.id = e.id;
    o.n = e.n;
    o.mean = e.mean_value();
    const OrbitEntry* ep = &e;
    o.index = [ep](long long m) { return ep->index(m); };
    std::map<long long, std::vector<int>> supplied;
    if (e.record) supplied = e.record->type_numbers;
    const long long period = e.formula ? e.formula->degeneracy_period() : 0;
    o.type_numbers = [ep, supplied, period](long long m) {
      const int nu = ep->nullity(m);
      if (nu == 1) return nondegenerate_type_numbers(ep->index(m), ep->index(1));
      const long long key = period > 0 ? ((m - 1) % period) + 1 : m;
      auto it = supplied.find(key);
      if (it == supplied.end())
        throw Error(ErrorKind::InvalidTypeNumbers,
                    "orbit " + ep->id + ": no type numbers for degenerate iterate " + std::to_string(m));
      const auto v = validate_type_numbers(it->second, nu);
      if (!v.empty()) throw Error(ErrorKind::InvalidTypeNumbers, "orbit " + ep->id + ": rule (" + v.front().rule + ")");
      return it->second;
    };
    periodic.push_back(std::move(o));
  }
  const MorseSeries ps = morse_series(periodic, cfg.window, false);
  const MorseVerdict pv = morse_inequality_check(ps, n);
  j["periodic"] = to_json(ps, pv);
  bool ok = pv.pass;

  std::vector<MorseOrbit> symmetric;
  bool complete = true;
  for (const auto& e : entries) {
    if (!e.symmetric()) continue;
    auto fn = e.symmetric_index_fn();
    if (!fn) {
      complete = false;
      continue;
    }
    double ibar_hat = e.mean_value() / 2.0;
    if (e.record && e.record->ibar_hat) ibar_hat = e.record->ibar_hat->to_double();
    symmetric.push_back(symmetric_morse_orbit(e.id, *fn, ibar_hat, e.n));
  }
  if (!symmetric.empty() && complete) {
    const MorseSeries ss = morse_series(symmetric, cfg.window, true);
    const MorseVerdict sv = morse_inequality_check(ss, n);
    j["symmetric"] = to_json(ss, sv);
    ok = ok && sv.pass;
  } else if (!symmetric.empty() || !complete) {
    j["symmetric_note"] = "symmetric series skipped: odd-iterate indices unavailable for some orbit";
  }
  j["verdict"] = ok ? "PASS" : "FAIL";
  pass = ok;
  return j;
}

Json check_jumps(const std::vector<OrbitEntry>& entries, const RunConfig& cfg, bool& pass,
                 std::vector<IndexJump>* found = nullptr) {
  Json j;
  std::vector<JumpRecord> recs;
  Json splits = Json::array();
  std::string problem;
  for (const auto& e : entries) {
    if (!e.formula) {
      problem = "orbit " + e.id + " has no iteration formula" +
                (e.computed && !e.computed->formula_note.empty() ? " (" + e.computed->formula_note + ")" : "");
      break;
    }
    JumpRecord r{*e.formula, std::nullopt};
    Json s;
    s["orbit"] = e.id;
    s["normal_form"] = e.formula->splitting_plus();
    if (e.computed && e.computed->s_plus_limit) {
      r.splitting_plus = *e.computed->s_plus_limit;
      s["limit"] = *e.computed->s_plus_limit;
      if (*e.computed->s_plus_limit != e.formula->splitting_plus()) s["disagreement"] = true;
    } else if (e.record && e.record->splitting_plus) {
      r.splitting_plus = *e.record->splitting_plus;
      s["supplied"] = *e.record->splitting_plus;
    } else {
      r.splitting_plus = e.formula->splitting_plus();
    }
    if (!(e.formula->mean().value() > 0.0)) {
      problem = "orbit " + e.id + " has non-positive mean index";
      break;
    }
    splits.push_back(s);
    recs.push_back(std::move(r));
  }
  j["splitting_plus"] = splits;
  if (!problem.empty()) {
    j["note"] = problem;
    j["verdict"] = "FAIL";
    pass = false;
    return j;
  }
  const auto jumps = find_index_jump(recs, cfg.jump_n_max);
  Json list = Json::array();
  for (std::size_t k = 0; k < jumps.size() && k < 20; ++k) list.push_back(to_json(jumps[k]));
  j["n_max"] = cfg.jump_n_max;
  j["count"] = jumps.size();
  j["first"] = list;
  j["verdict"] = jumps.empty() ? "FAIL" : "PASS";
  pass = !jumps.empty();
  if (found) *found = jumps;
  return j;
}

int exit_for(const std::exception& e, std::ostream& err) {
  if (auto* me = dynamic_cast<const Error*>(&e)) {
    err << "error: " << me->what() << '\n';
    return me->kind() == ErrorKind::InvalidInput ? 2 : 3;
  }
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const nlohmann::json::exception*>(&e)) {
    err << "config error: " << e.what() << '\n';
    return 2;
  }
  err << "error: " << e.what() << '\n';
  return 3;
}

}  // namespace

// ---------------------------------------------------------------- public

RunConfig parse_config(const Json& j) {
  try {
    only_keys(j,
              {"schema_version", "surface", "orbits", "max_iterate", "window", "alpha", "tolerances", "checks",
               "jump_n_max", "refinement", "outputs", "samples"},
              "config");
    RunConfig cfg;
    if (j.contains("schema_version"))
      require(j["schema_version"] == kSchemaVersion, "unsupported schema_version");
    if (j.contains("surface")) cfg.surface = j["surface"];
    const Json orbits = j.value("orbits", Json{{"source", "closed_form"}});
    only_keys(orbits, {"source", "seeds", "records"}, "orbits");
    const std::string src = orbits.value("source", "closed_form");
    if (src == "closed_form") {
      cfg.source = OrbitSource::ClosedForm;
    } else if (src == "shooting") {
      cfg.source = OrbitSource::Shooting;
      require(orbits.contains("seeds") && orbits["seeds"].is_array() && !orbits["seeds"].empty(),
              "shooting needs seeds");
      std::size_t k = 0;
      for (const auto& s : orbits["seeds"]) {
        only_keys(s, {"id", "y0", "period"}, "seed");
        ShootSeed seed;
        seed.id = s.value("id", "y" + std::to_string(++k));
        const auto y = s.at("y0").get<std::vector<double>>();
        seed.y0 = Eigen::Map<const Vec>(y.data(), static_cast<Eigen::Index>(y.size()));
        seed.period = positive(s.at("period"), "seed period");
        cfg.seeds.push_back(seed);
      }
    } else if (src == "formulas") {
      cfg.source = OrbitSource::Formulas;
      require(orbits.contains("records") && orbits["records"].is_array() && !orbits["records"].empty(),
              "formula source needs records");
      for (std::size_t k = 0; k < orbits["records"].size(); ++k)
        cfg.records.push_back(parse_record(orbits["records"][k], k));
    } else {
      throw ConfigError("orbit source must be closed_form, shooting or formulas");
    }
    if (cfg.source != OrbitSource::Formulas) {
      require(!cfg.surface.is_null(), "config needs a surface");
      (void)build_surface(cfg.surface);  // validate early
    }
    cfg.max_iterate = j.value("max_iterate", 64);
    require(cfg.max_iterate >= 4, "max_iterate must be at least 4");
    if (j.contains("window")) {
      const Json& w = j["window"];
      if (w.is_array()) {
        require(w.size() == 2 && w[0].is_number_integer() && w[1].is_number_integer(), "window must be [-W, W]");
        require(w[0].get<int>() == -w[1].get<int>(), "window must be symmetric about 0");
        cfg.window = w[1].get<int>();
      } else {
        require(w.is_number_integer(), "window must be an integer or [-W, W]");
        cfg.window = w.get<int>();
      }
      require(cfg.window >= 0, "window must be non-negative");
    }
    if (j.contains("alpha")) {
      cfg.alpha = j["alpha"].get<double>();
      require(cfg.alpha > 1.0 && cfg.alpha < 2.0, "alpha must lie in (1, 2)");
    }
    if (j.contains("tolerances")) {
      const Json& t = j["tolerances"];
      only_keys(t, {"periodic", "symmetric", "on_circle", "at_one", "off_circle", "flow_rel", "flow_abs"},
                "tolerances");
      if (t.contains("periodic")) cfg.identity_tol.periodic = positive(t["periodic"], "periodic tolerance");
      if (t.contains("symmetric")) cfg.identity_tol.symmetric = positive(t["symmetric"], "symmetric tolerance");
      if (t.contains("on_circle")) cfg.thresholds.on_circle = positive(t["on_circle"], "on_circle");
      if (t.contains("at_one")) cfg.thresholds.at_one = positive(t["at_one"], "at_one");
      if (t.contains("off_circle")) cfg.thresholds.off_circle = positive(t["off_circle"], "off_circle");
      if (t.contains("flow_rel")) cfg.flow.rel_tol = positive(t["flow_rel"], "flow_rel");
      if (t.contains("flow_abs")) cfg.flow.abs_tol = positive(t["flow_abs"], "flow_abs");
    }
    if (j.contains("samples")) {
      cfg.flow.samples = j["samples"].get<int>();
      require(cfg.flow.samples >= 0, "samples must be non-negative");
    }
    if (j.contains("checks")) {
      cfg.checks.clear();
      for (const auto& c : j["checks"]) {
        const auto s = c.get<std::string>();
        require(std::find(kAllChecks.begin(), kAllChecks.end(), s) != kAllChecks.end(), "unknown check '" + s + "'");
        cfg.checks.push_back(s);
      }
    }
    if (j.contains("jump_n_max")) {
      cfg.jump_n_max = j["jump_n_max"].get<long long>();
      require(cfg.jump_n_max >= 1, "jump_n_max must be positive");
    }
    cfg.refinement = j.value("refinement", true);
    if (j.contains("outputs")) {
      only_keys(j["outputs"], {"json", "csv"}, "outputs");
      if (j["outputs"].contains("json")) cfg.out_json = j["outputs"]["json"].get<std::string>();
      if (j["outputs"].contains("csv")) cfg.out_csv = j["outputs"]["csv"].get<std::string>();
    }
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(e.what());
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

RunConfig load_config(const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return parse_config(j);
}

void apply_overrides(RunConfig& cfg, const Overrides& o) {
  if (o.checks) {
    for (const auto& c : *o.checks)
      require(std::find(kAllChecks.begin(), kAllChecks.end(), c) != kAllChecks.end(), "unknown check '" + c + "'");
    cfg.checks = *o.checks;
  }
  if (o.out) cfg.out_json = *o.out;
  if (o.tol_periodic) cfg.identity_tol.periodic = *o.tol_periodic;
  if (o.tol_symmetric) cfg.identity_tol.symmetric = *o.tol_symmetric;
  if (o.tol_at_one) cfg.thresholds.at_one = *o.tol_at_one;
  if (o.tol_on_circle) cfg.thresholds.on_circle = *o.tol_on_circle;
  if (o.max_iterate) cfg.max_iterate = *o.max_iterate;
  require(cfg.max_iterate >= 4, "max_iterate must be at least 4");
  require(cfg.identity_tol.periodic > 0 && cfg.identity_tol.symmetric > 0 && cfg.thresholds.at_one > 0 &&
              cfg.thresholds.on_circle > 0,
          "tolerances must be positive");
}

int thread_cap() {
  if (const char* env = std::getenv("MASLOVKIT_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

Analysis analyze(const RunConfig& cfg) {
  const bool need_formula = wants(cfg, "jumps") || wants(cfg, "indices") || wants(cfg, "morse");
  const std::vector<OrbitEntry> entries = build_entries(cfg, need_formula);

  Analysis a;
  Json& r = a.report;
  r["schema_version"] = kSchemaVersion;
  r["config"] = config_echo(cfg);

  Json orbits = Json::array();
  Json records = Json::array();
  Json formulas = Json::array();
  for (const auto& e : entries) {
    if (e.computed) {
      Json o = to_json(e.computed->orbit, e.computed->stability);
      o["id"] = e.id;
      orbits.push_back(o);
      Json rec = to_json(e.computed->record);
      rec["id"] = e.id;
      records.push_back(rec);
    }
    if (e.formula) {
      Json f = to_json(*e.formula, e.computed ? static_cast<int>(e.computed->record.iterates.size()) : 16);
      f["id"] = e.id;
      formulas.push_back(f);
    } else if (e.computed && !e.computed->formula_note.empty()) {
      formulas.push_back(Json{{"id", e.id}, {"unavailable", e.computed->formula_note}});
    }
  }
  r["orbits"] = orbits;
  r["index_records"] = records;
  r["formulas"] = formulas;

  Json checks = Json::object();
  bool pass = true;
  for (const auto& c : cfg.checks) {
    bool ok = true;
    if (c == "indices") {
      checks[c] = check_indices(entries, ok);
    } else if (c == "bott") {
      checks[c] = check_bott(entries, ok);
    } else if (c == "identities") {
      Json id;
      std::vector<OrbitInvariants> inv;
      for (const auto& e : entries) inv.push_back(invariants_of(e, false));
      a.identities = identity_sums(inv, cfg.identity_tol);
      id["primary"] = identities_json(a.identities, ok);
      id["mode"] = a.identities.empty() || a.identities.front().exact ? "exact" : "numeric";
      const bool any_bracket = std::any_of(entries.begin(), entries.end(), [](const OrbitEntry& e) {
        return e.has_bracket;
      });
      if (any_bracket && std::all_of(entries.begin(), entries.end(), [](const OrbitEntry& e) {
            return e.has_bracket;
          })) {
        std::vector<OrbitInvariants> num;
        for (const auto& e : entries) num.push_back(invariants_of(e, true));
        id["numeric"] = identities_json(identity_sums(num, cfg.identity_tol), ok);
      }
      id["per_orbit"] = Json::array();
      for (const auto& o : inv) {
        Json po;
        po["orbit"] = o.id;
        po["ihat"] = o.ihat.exact ? quad_json(*o.ihat.exact) : to_json(o.ihat.bracket);
        po["chi_hat"] = o.chi_hat ? rational_json(*o.chi_hat) : Json("unknown");
        po["symmetric"] = o.symmetric;
        if (o.symmetric) po["chibar_hat"] = o.chibar_hat ? rational_json(*o.chibar_hat) : Json("unknown");
        id["per_orbit"].push_back(po);
      }
      id["verdict"] = ok ? "PASS" : "FAIL";
      checks[c] = id;
      a.csv = identities_csv(a.identities);
    } else if (c == "morse") {
      checks[c] = check_morse(entries, cfg, ok);
    } else if (c == "jumps") {
      checks[c] = check_jumps(entries, cfg, ok);
    }
    pass = pass && ok;
  }
  r["checks"] = checks;
  r["caveats"] = Json::array({"identity verdicts assume the supplied orbits are all prime closed characteristics",
                              "Morse windows count every iterate whose index lands inside the window"});
  r["verdict"] = pass ? "PASS" : "FAIL";
  a.pass = pass;
  return a;
}

int cmd_analyze(const std::string& config_path, const Overrides& o, std::ostream& out, std::ostream& err) {
  try {
    RunConfig cfg = load_config(config_path);
    apply_overrides(cfg, o);
    const Analysis a = analyze(cfg);
    const std::string text = a.report.dump(2) + "\n";
    if (cfg.out_json)
      write_file(*cfg.out_json, text);
    else
      out << text;
    if (cfg.out_csv && a.csv) write_file(*cfg.out_csv, *a.csv);
    for (const auto& [name, c] : a.report["checks"].items())
      err << name << ": " << c.value("verdict", "?") << '\n';
    return a.pass ? 0 : 1;
  } catch (const std::exception& e) {
    return exit_for(e, err);
  }
}

int cmd_index(const std::string& path_file, const std::string& omega, std::ostream& out, std::ostream& err) {
  try {
    Complex w = 1.0;
    if (omega == "1") {
      w = 1.0;
    } else if (omega == "-1") {
      w = -1.0;
    } else if (omega.rfind("exp:", 0) == 0) {
      double theta = 0.0;
      try {
        theta = std::stod(omega.substr(4));
      } catch (const std::exception&) {
        throw ConfigError("bad omega " + omega);
      }
      w = std::polar(1.0, theta);
    } else {
      throw ConfigError("omega must be 1, -1 or exp:<theta>");
    }
    const SymplecticPath p = parse_path_csv(read_file(path_file));
    const int i = omega_index(p, w);
    const int nu = omega_nullity(p.end(), w);
    out << i << ' ' << nu << '\n';
    return 0;
  } catch (const std::exception& e) {
    return exit_for(e, err);
  }
}

int cmd_orbits(const std::string& config_path, const Overrides& o, std::ostream& out, std::ostream& err) {
  try {
    RunConfig cfg = load_config(config_path);
    apply_overrides(cfg, o);
    if (cfg.source == OrbitSource::Formulas) throw ConfigError("orbits needs a surface-based orbit source");
    const GaugeSurface surface = build_surface(cfg.surface);
    std::vector<ClosedCharacteristic> orbits;
    std::vector<std::string> ids;
    if (cfg.source == OrbitSource::ClosedForm) {
      if (!surface.is_ellipsoid()) throw ConfigError("closed-form orbits need an ellipsoid surface");
      orbits = ellipsoid_orbits(surface, cfg.alpha);
      for (std::size_t k = 0; k < orbits.size(); ++k) ids.push_back("y" + std::to_string(k + 1));
    } else {
      ShootOptions so;
      so.alpha = cfg.alpha;
      orbits.resize(cfg.seeds.size());
      for (const auto& s : cfg.seeds) ids.push_back(s.id);
      parallel_for(cfg.seeds.size(),
                   [&](std::size_t i) { orbits[i] = shoot_orbit(surface, cfg.seeds[i].y0, cfg.seeds[i].period, so); });
    }
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["orbits"] = Json::array();
    for (std::size_t i = 0; i < orbits.size(); ++i) {
      Json oj = to_json(orbits[i], classify_stability(orbits[i].monodromy, cfg.thresholds));
      oj["id"] = ids[i];
      j["orbits"].push_back(oj);
    }
    const std::string text = j.dump(2) + "\n";
    if (cfg.out_json)
      write_file(*cfg.out_json, text);
    else
      out << text;
    return 0;
  } catch (const std::exception& e) {
    return exit_for(e, err);
  }
}

int cmd_jumps(const std::string& config_path, std::optional<long long> n_max, const Overrides& o, std::ostream& out,
              std::ostream& err) {
  try {
    RunConfig cfg = load_config(config_path);
    apply_overrides(cfg, o);
    if (n_max) {
      if (*n_max < 1) throw ConfigError("n-max must be positive");
      cfg.jump_n_max = *n_max;
    }
    cfg.checks = {"jumps"};
    cfg.refinement = false;
    const auto entries = build_entries(cfg, true);
    bool ok = true;
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["jumps"] = check_jumps(entries, cfg, ok);
    const std::string text = j.dump(2) + "\n";
    if (cfg.out_json)
      write_file(*cfg.out_json, text);
    else
      out << text;
    return ok ? 0 : 1;
  } catch (const std::exception& e) {
    return exit_for(e, err);
  }
}

}  // namespace maslovkit
