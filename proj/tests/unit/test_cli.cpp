#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int cli(const std::string& args) {
  const std::string cmd = std::string(ATOMION_CLI) + " -q " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("cli: exit codes") {
  const auto out = fs::temp_directory_path() / "atomion-cli-test";
  fs::remove_all(out);
  const std::string common = "-o " + out.string() + " --cache-root " + (out / "cache").string() + " ";

  CHECK(cli("--version") == 0);
  CHECK(cli(common + "-s emit=[] sweep") == 0);
  CHECK(fs::exists(out / "manifest.json"));
  CHECK_FALSE(fs::exists(out / "spectrum.csv"));

  // Invalid values and unknown fields.
  CHECK(cli(common + "-s sweep.g=[-1] sweep") == 2);
  CHECK(cli(common + "-s grid.cmf_pionts=64 sweep") == 2);
  // Ion-frame output requested at beta = 0.
  CHECK(cli(common + "-s 'emit=[\"densities\"]' -s sweep.beta=[0] sweep") == 2);

  const auto bad = out / "bad.json";
  std::ofstream(bad) << "{\n  \"sweep\": {\"g\": [1,]}\n}\n";
  CHECK(cli(common + "-c " + bad.string() + " sweep") == 2);

  // A solver that cannot converge.
  CHECK(cli(common + "-s sweep.g=[1] -s sweep.beta=[0] -s grid.cmf_points=48 -s solver.max_iterations=2 solve") == 3);

  CHECK(cli(common + "verify --check analytic_oscillator --check bound_states") == 0);
  CHECK(cli(common + "-s grid.lf_extent=1 -s grid.lf_points=128 verify --check boundary_decay_lf") == 1);

  CHECK(cli(common + "-s sweep.g=[0] -s sweep.beta=[0] -s grid.cmf_points=48 solve") == 0);
  CHECK(cli(common + "cache ls") == 0);
  CHECK(cli(common + "cache rm") == 2);
  CHECK(cli(common + "cache rm --all") == 0);
  fs::remove_all(out);
}
