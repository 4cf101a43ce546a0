#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "maslovkit/io.hpp"
#include "maslovkit/orbits.hpp"
#include "maslovkit/pipeline.hpp"

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <sstream>

using namespace maslovkit;
namespace fs = std::filesystem;

namespace {

const std::string kConfigs = MASLOVKIT_CONFIGS;
const std::string kBin = MASLOVKIT_BIN;
const std::string kData = MASLOVKIT_DATA;

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / ("maslovkit_cli_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

int run(const std::string& args, const std::string& env = "") {
  const int status = std::system((env + " '" + kBin + "' " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

struct Result {
  int code;
  std::string out, err;
};

Result analyze(const std::string& config, const Overrides& o = {}) {
  std::ostringstream out, err;
  const int code = cmd_analyze(kConfigs + "/" + config, o, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("analyze exit codes") {
  const Result ok = analyze("ellipsoid_sqrt2.json");
  CHECK(ok.code == 0);
  const Json report = Json::parse(ok.out);
  CHECK(report["schema_version"] == 1);

  const Result tight = analyze("tight_window.json");
  CHECK(tight.code == 3);
  CHECK(tight.err.find("TruncationTooTight") != std::string::npos);

  const Result s11 = analyze("monotonicity_contradiction.json");
  CHECK(s11.code == 1);
  CHECK(s11.out.find("m_-1 = 0 < m_-2") != std::string::npos);

  const Result s12 = analyze("forced_symmetric_euler.json");
  CHECK(s12.code == 1);
  const Json r12 = Json::parse(s12.out);
  bool forced_zero = false;
  for (const auto& rep : r12["checks"]["identities"]["primary"])
    if (rep["identity"] == "symmetric_positive" && rep.contains("forced"))
      forced_zero = rep["forced"]["value"]["num"] == 0 && rep["forced"]["admissible"] == false;
  CHECK(forced_zero);

  CHECK(analyze("jump_pair.json").code == 0);
  CHECK(analyze("does_not_exist.json").code == 2);
}

TEST_CASE("config errors exit 2") {
  const fs::path dir = scratch();
  write_file((dir / "bad.json").string(), R"({"schema_version":1,"surface":{"kind":"ellipsoid"},"bogus":1})");
  std::ostringstream out, err;
  CHECK(cmd_analyze((dir / "bad.json").string(), {}, out, err) == 2);
  write_file((dir / "broken.json").string(), "{");
  CHECK(cmd_analyze((dir / "broken.json").string(), {}, out, err) == 2);
}

TEST_CASE("index on a stored half path") {
  std::ostringstream out, err;
  REQUIRE(cmd_index(kData + "/ellipsoid_half_path.csv", "-1", out, err) == 0);
  // Own plane lands on -1; the other plane turns by π√2, crossing -1 once.
  CHECK(out.str() == "2 1\n");

  const fs::path dir = scratch();
  const std::vector<double> radii{1.0, std::pow(2.0, 0.25)};
  const double half = std::acos(-1.0) * std::sqrt(2.0);
  write_file((dir / "dense.csv").string(), path_csv(ellipsoid_path(radii, 1, half, 400)));
  std::ostringstream dense;
  CHECK(cmd_index((dir / "dense.csv").string(), "-1", dense, err) == 0);
  CHECK(dense.str() == out.str());

  std::string text = read_file(kData + "/ellipsoid_half_path.csv");
  const auto second_line = text.find('\n') + 1;
  text.replace(second_line, 1, "0,2");
  write_file((dir / "corrupt.csv").string(), text);
  std::ostringstream bad;
  CHECK(cmd_index((dir / "corrupt.csv").string(), "-1", bad, err) == 2);
  CHECK(cmd_index(kData + "/ellipsoid_half_path.csv", "i", bad, err) == 2);
}

TEST_CASE("orbits and jumps commands") {
  std::ostringstream out, err;
  CHECK(cmd_orbits(kConfigs + "/ellipsoid_sqrt2.json", {}, out, err) == 0);
  CHECK(Json::parse(out.str()).contains("orbits"));
  std::ostringstream jout;
  CHECK(cmd_jumps(kConfigs + "/jump_pair.json", 200, {}, jout, err) == 0);
  CHECK_FALSE(Json::parse(jout.str())["jumps"].empty());
}

TEST_CASE("binary exit codes and determinism") {
  CHECK(run("--help") == 0);
  CHECK(run("analyze") == 2);
  CHECK(run("analyze --config '" + kConfigs + "/ellipsoid_sqrt2.json' --check indices") == 0);
  CHECK(run("analyze --config '" + kConfigs + "/tight_window.json'") == 3);
  CHECK(run("analyze --config '" + kConfigs + "/monotonicity_contradiction.json'") == 1);
  CHECK(run("index --path '" + kData + "/ellipsoid_half_path.csv' --omega -1") == 0);

  const fs::path dir = scratch();
  const std::string a = (dir / "a.json").string(), b = (dir / "b.json").string();
  REQUIRE(run("analyze --config '" + kConfigs + "/ellipsoid_sqrt2.json' --out '" + a + "'") == 0);
  REQUIRE(run("analyze --config '" + kConfigs + "/ellipsoid_sqrt2.json' --out '" + b + "'", "MASLOVKIT_THREADS=1") == 0);
  CHECK(read_file(a) == read_file(b));
  fs::remove_all(dir);
}
