#pragma once

#include "maslovkit/io.hpp"
#include "maslovkit/orbits.hpp"
#include "maslovkit/resonance.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace maslovkit {

/// Malformed or inconsistent configuration (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OrbitSource { ClosedForm, Shooting, Formulas };

struct ShootSeed {
  std::string id;
  Vec y0;
  double period = 0.0;
};

/// Iteration data given directly instead of computed from a surface.
struct FormulaRecord {
  std::string id;
  NormalCase kind = NormalCase::Hyperbolic;
  int b = 0;
  std::optional<QuadNumber> rotation;  // θ/2π for case 2
  int i1 = 0;                          // Morse normalisation
  bool chi_given = false;
  std::optional<Rational> chi_hat;  // given but empty means unknown
  std::map<long long, std::vector<int>> type_numbers;
  std::optional<int> splitting_plus;
  bool symmetric = false;
  std::optional<int> ibar;
  std::optional<int> i_psi;  // hyperbolic half block: i(ψ)
  std::optional<QuadNumber> ibar_hat;
  bool chibar_given = false;
  std::optional<Rational> chibar_hat;
  bool symmetric_nondegenerate = true;
};

inline const std::vector<std::string> kAllChecks = {"indices", "bott", "identities", "morse", "jumps"};

struct RunConfig {
  Json surface;  // as given; empty for formula-only runs
  OrbitSource source = OrbitSource::ClosedForm;
  std::vector<ShootSeed> seeds;
  std::vector<FormulaRecord> records;
  int max_iterate = 64;
  int window = 16;  // [−window, window]
  double alpha = kDefaultAlpha;
  IdentityTolerances identity_tol;
  Thresholds thresholds;
  FlowOptions flow;
  std::vector<std::string> checks = kAllChecks;
  long long jump_n_max = 1000;
  bool refinement = true;  // recompute index tables at doubled sampling
  std::optional<std::string> out_json;
  std::optional<std::string> out_csv;
};

/// Throws ConfigError.
RunConfig parse_config(const Json& j);
RunConfig load_config(const std::string& path);

/// Command-line overrides applied on top of a config.
struct Overrides {
  std::optional<std::vector<std::string>> checks;
  std::optional<std::string> out;
  std::optional<double> tol_periodic, tol_symmetric, tol_at_one, tol_on_circle;
  std::optional<int> max_iterate;
};
void apply_overrides(RunConfig& cfg, const Overrides& o);

struct Analysis {
  Json report;
  bool pass = false;
  std::vector<IdentityReport> identities;  // exact when available, else numeric
  std::optional<std::string> csv;
};

/// Runs the configured checks. Throws maslovkit::Error on numerical
/// failures and ConfigError on inconsistent inputs.
Analysis analyze(const RunConfig& cfg);

/// Worker count from MASLOVKIT_THREADS (default: hardware concurrency).
int thread_cap();

/// Exit codes: 0 pass, 1 verdict failure, 2 config error, 3 numerical error.
int cmd_analyze(const std::string& config_path, const Overrides& o, std::ostream& out, std::ostream& err);
int cmd_index(const std::string& path_file, const std::string& omega, std::ostream& out, std::ostream& err);
int cmd_orbits(const std::string& config_path, const Overrides& o, std::ostream& out, std::ostream& err);
int cmd_jumps(const std::string& config_path, std::optional<long long> n_max, const Overrides& o, std::ostream& out,
              std::ostream& err);

}  // namespace maslovkit
