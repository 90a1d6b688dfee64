#include "dtnlab/experiments.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace dtnlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("dtnlab_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(DTNLAB_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

constexpr const char* kDtn = "experiment = dtn\nmesh = disk:h=0.05\nmetric = euclidean\npotential = zero\n";

}  // namespace

TEST_CASE("config parsing") {
  const ExperimentConfig c = ExperimentConfig::parse("# comment\nexperiment = dtn  # trailing\n\nseed = 9\ntol.dtn = 1e-3\n"
                                                     "tol.dtn.symmetry = 0\n");
  CHECK(c.experiment == "dtn");
  CHECK(c.seed == 9);
  CHECK(c.tolerance("dtn.symmetry", 1.0) == 0.0);
  CHECK(c.tolerance("dtn.disk_spectrum", 1.0) == 1e-3);
  CHECK(c.tolerance("eigs.residual", 1.0) == 1.0);
  CHECK_NOTHROW(c.validate());

  CHECK_THROWS_WITH_AS(ExperimentConfig::parse("experiment = dtn\ncolour = red\n"), doctest::Contains("'colour'"), ConfigError);
  CHECK_THROWS_WITH_AS(ExperimentConfig::parse("experiment = dtn\nseed = 1\nseed = 2\n"), doctest::Contains("duplicate"),
                       ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse("seed = 1\n"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse("experiment dtn\n"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse("experiment = dtn\nseed = -3\n"), ConfigError);
}

TEST_CASE("config validation names the key") {
  CHECK_THROWS_WITH_AS(ExperimentConfig::parse("experiment = dtn\nmetric = hyperbolic\n").validate(),
                       doctest::Contains("'metric'"), ConfigError);
  CHECK_THROWS_WITH_AS(ExperimentConfig::parse("experiment = fourier\n").validate(), doctest::Contains("'experiment'"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(ExperimentConfig::parse("experiment = dtn\nmesh = disk:h=5\n").validate(),
                       doctest::Contains("'mesh'"), ConfigError);
  CHECK_THROWS_WITH_AS(ExperimentConfig::parse("experiment = dtn\ntol.dtn = -1\n").validate(),
                       doctest::Contains("'tol.dtn'"), ConfigError);
  CHECK_THROWS_WITH_AS(ExperimentConfig::parse("experiment = semilinear\nm = 1\n").validate(),
                       doctest::Contains("'m'"), ConfigError);
  CHECK_THROWS_WITH_AS(ExperimentConfig::parse("experiment = dtn\nmesh_file = /nonexistent.off\n").validate(),
                       doctest::Contains("'mesh_file'"), ConfigError);
}

TEST_CASE("run writes records and a manifest, report summarizes them") {
  const fs::path out = scratch("run");
  std::ostringstream log;
  CHECK(run_experiments(ExperimentConfig::parse(kDtn), RunOptions{out, 0}, log) == 0);
  CHECK(fs::exists(out / "manifest.json"));
  CHECK(fs::exists(out / "dtn_spectrum.csv"));
  const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(manifest["failures"] == 0);
  const auto records = nlohmann::json::parse(slurp(out / "dtn.json"));
  for (const auto& c : records["checks"]) {
    CHECK(c.contains("ref"));
    CHECK(!c["ref"].get<std::string>().empty());
    CHECK(c["pass"] == true);
  }
  const ReportSummary s = report_directory(out);
  CHECK(s.checks > 0);
  CHECK(s.failures == 0);
  CHECK(s.table.find("dtn.disk_spectrum") != std::string::npos);
}

TEST_CASE("zero tolerance induces failures") {
  const fs::path out = scratch("fail");
  std::ostringstream log;
  const std::string cfg = std::string(kDtn) + "tol.dtn = 0\n";
  CHECK(run_experiments(ExperimentConfig::parse(cfg), RunOptions{out, 0}, log) == 1);
  CHECK(report_directory(out).failures > 0);
  CHECK_THROWS_AS(report_directory(scratch("empty")), ContractError);
}

TEST_CASE("identical runs are byte-identical across thread counts") {
  const fs::path a = scratch("rep_a"), b = scratch("rep_b");
  const std::string cfg = "experiment = eigs\nmesh = disk:h=0.1\neigen_count = 6\n";
  std::ostringstream log;
  run_experiments(ExperimentConfig::parse(cfg), RunOptions{a, 0}, log);
  run_experiments(ExperimentConfig::parse(cfg), RunOptions{b, 1}, log);
  int files = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    CHECK(slurp(e.path()) == slurp(b / e.path().filename()));
    ++files;
  }
  CHECK(files >= 3);
}

TEST_CASE("command line exit codes") {
  const fs::path dir = scratch("cli");
  std::ofstream(dir / "ok.cfg") << kDtn;
  std::ofstream(dir / "bad.cfg") << "experiment = dtn\nmetric = hyperbolic\n";
  std::ofstream(dir / "tight.cfg") << kDtn << "tol.dtn = 0\n";
  CHECK(run_cli("run " + (dir / "ok.cfg").string() + " --out " + (dir / "ok").string() + " --jobs 2") == 0);
  CHECK(run_cli("report " + (dir / "ok").string()) == 0);
  CHECK(run_cli("run " + (dir / "bad.cfg").string() + " --out " + (dir / "bad").string()) == 2);
  CHECK(run_cli("run " + (dir / "tight.cfg").string() + " --out " + (dir / "tight").string()) == 1);
  CHECK(run_cli("run " + (dir / "missing.cfg").string()) == 2);
  CHECK(run_cli("report " + (dir / "nothing").string()) == 2);
  CHECK(run_cli("frobnicate") == 2);
}
