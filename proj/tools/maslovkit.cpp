#include "maslovkit/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

namespace {

std::vector<std::string> split_checks(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"maslovkit: Maslov-type indices and resonance identities for closed characteristics"};
  app.require_subcommand(1);

  maslovkit::Overrides ov;
  std::string config, checks, out, path, omega = "1";
  double tol_periodic = 0, tol_symmetric = 0, tol_at_one = 0, tol_on_circle = 0;
  int max_iterate = 0;
  long long n_max = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "run configuration (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "write the JSON report here instead of stdout");
    sub->add_option("--tol-periodic", tol_periodic, "tolerance for the periodic identities");
    sub->add_option("--tol-symmetric", tol_symmetric, "tolerance for the symmetric identities");
    sub->add_option("--tol-at-one", tol_at_one, "band for multipliers equal to 1");
    sub->add_option("--tol-on-circle", tol_on_circle, "band for multipliers on the unit circle");
    sub->add_option("--max-iterate", max_iterate, "iterate depth M (at least 4)");
  };

  auto* analyze = app.add_subcommand("analyze", "run the configured checks and emit a report");
  add_common(analyze);
  analyze->add_option("--check", checks, "comma-separated subset of indices,bott,identities,morse,jumps");

  auto* index = app.add_subcommand("index", "omega-index and nullity of a sampled path (CSV)");
  index->add_option("--path", path, "CSV rows: t, then the 2n x 2n matrix row-major")->required();
  index->add_option("--omega", omega, "1, -1 or exp:<theta>");

  auto* orbits = app.add_subcommand("orbits", "closed characteristics and their multipliers");
  add_common(orbits);

  auto* jumps = app.add_subcommand("jumps", "common index jump search");
  add_common(jumps);
  jumps->add_option("--n-max", n_max, "largest N searched");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (!checks.empty()) ov.checks = split_checks(checks);
  if (!out.empty()) ov.out = out;
  if (tol_periodic > 0) ov.tol_periodic = tol_periodic;
  if (tol_symmetric > 0) ov.tol_symmetric = tol_symmetric;
  if (tol_at_one > 0) ov.tol_at_one = tol_at_one;
  if (tol_on_circle > 0) ov.tol_on_circle = tol_on_circle;
  if (max_iterate != 0) ov.max_iterate = max_iterate;

  if (*analyze) return maslovkit::cmd_analyze(config, ov, std::cout, std::cerr);
  if (*index) return maslovkit::cmd_index(path, omega, std::cout, std::cerr);
  if (*orbits) return maslovkit::cmd_orbits(config, ov, std::cout, std::cerr);
  std::optional<long long> nm;
  if (n_max != 0) nm = n_max;
  return maslovkit::cmd_jumps(config, nm, ov, std::cout, std::cerr);
}
