#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "shellspec/error.hpp"
#include "shellspec/suites.hpp"

using namespace shellspec;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::Consistency;
}

ExperimentConfig config(const std::string& suite, const std::string& dir) {
  fs::remove_all(dir);
  fs::create_directories(dir);
  ExperimentConfig c;
  c.suite = suite;
  c.out_dir = dir;
  return c;
}

}  // namespace

TEST_CASE("config parsing") {
  const auto c = ExperimentConfig::from_json(nlohmann::json::parse(
      R"({"suite":"hw-verify","inner":"robin:10","outer":"dirichlet","grid":[1.5,1.7],"seed":7})"));
  CHECK(c.suite == "hw-verify");
  CHECK(c.inner == BoundaryCondition::robin(10.0));
  CHECK(c.outer.is_dirichlet());
  CHECK(c.grid.size() == 2);
  CHECK(c.seed == 7);

  CHECK(kind_of([] { ExperimentConfig::from_json(nlohmann::json::parse(R"({"sweet":"x"})")); }) ==
        ErrorKind::Usage);
  CHECK(kind_of([] { ExperimentConfig::from_json(nlohmann::json::parse(R"({"tol":"tiny"})")); }) ==
        ErrorKind::Usage);
  CHECK(kind_of([] { ExperimentConfig::from_json(nlohmann::json::parse("[1,2]")); }) == ErrorKind::Usage);
}

TEST_CASE("validation") {
  ExperimentConfig c;
  c.suite = "morse3d";
  CHECK_NOTHROW(c.validate());
  c.tol = 0.0;
  CHECK(kind_of([&] { c.validate(); }) == ErrorKind::Usage);
  c.tol = 1e-10;
  c.domain_file = "no/such/file.json";
  CHECK(kind_of([&] { c.validate(); }) == ErrorKind::Io);
  c.domain_file.clear();
  c.suite = "no-such-suite";
  CHECK(kind_of([&] { run_suite(c); }) == ErrorKind::Usage);
  CHECK(suite_names().size() == 6);
}

TEST_CASE("shell-tables with a one-row grid") {
  auto c = config("shell-tables", "suite_one_row");
  c.grid = {1.5};
  const auto r = run_suite(c);
  CHECK(r.exit_code() == 0);
  const std::string csv = slurp(fs::path(c.out_dir) / "shell-tables_rn_N2_h0.5.csv");
  CHECK(csv == "radius,lambda\n1.5," + csv.substr(csv.rfind(',') + 1));
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
  CHECK(fs::exists(fs::path(c.out_dir) / "shell-tables.json"));
  CHECK(fs::exists(fs::path(c.out_dir) / "shell-tables_maxmin.svg"));
}

TEST_CASE("fixed seeds give byte-identical artifacts") {
  for (const std::string suite : {"morse3d", "geometry-checks", "shell-tables"}) {
    CAPTURE(suite);
    const auto a = run_suite(config(suite, "suite_det_a"));
    const auto b = run_suite(config(suite, "suite_det_b"));
    CHECK(a.ok());
    REQUIRE(a.files.size() == b.files.size());
    for (std::size_t i = 0; i < a.files.size(); ++i) {
      const auto name = fs::path(a.files[i]).filename();
      CHECK(slurp(fs::path("suite_det_a") / name) == slurp(fs::path("suite_det_b") / name));
    }
  }
}

TEST_CASE("hw-verify on a domain file") {
  auto c = config("hw-verify", "suite_hw");
  c.domain_file = SHELLSPEC_DATA_DIR "/eccentric_annulus.json";
  const auto r = run_suite(c);
  CHECK(r.exit_code() == 0);
  const auto j = nlohmann::json::parse(slurp(fs::path(c.out_dir) / "hw-verify.json"));
  CHECK(j["ok"].get<bool>());
  bool any = false;
  for (const auto& row : j["results"]["reports"]) {
    CHECK(row["margin"].get<double>() > row["error_bar"].get<double>());
    any = true;
  }
  CHECK(any);
}
