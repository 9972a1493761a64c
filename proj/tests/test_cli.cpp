#include "doctest.h"

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string("\"") + SHELLSPEC_BIN + "\" " + args + " 2>&1";
  Run r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), static_cast<int>(buf.size()), pipe)) r.out += buf.data();
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string data(const std::string& name) { return std::string(SHELLSPEC_DATA_DIR) + "/" + name; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("shell subcommand prints the eigenvalue") {
  const auto r = run("shell --dim 3 --alpha 1 --beta 2");
  CHECK(r.code == 0);
  CHECK(r.out.find("9.869604401") != std::string::npos);
  const auto j = run("shell --dim 2 --inner robin:1 --outer robin:1 --json");
  CHECK(j.code == 0);
  CHECK(nlohmann::json::parse(j.out)["lambda"].get<double>() > 0.0);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(run("").code == 2);
  CHECK(run("no-such-command").code == 2);
  CHECK(run("suite no-such-suite").code == 2);
  CHECK(run("shell --alpha 2 --beta 1").code == 2);
  CHECK(run("shell --tol -1").code == 2);
}

TEST_CASE("counterexample at k = 16 is reversed") {
  const auto r = run("counterexample --k 16");
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["rows"][0]["reversed"].get<bool>());
  CHECK(j["first_reversed_k"].get<double>() == 16.0);
}

TEST_CASE("hw-verify on the eccentric annulus file") {
  const auto r = run("hw-verify --domain \"" + data("eccentric_annulus.json") + "\"");
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["margin"].get<double>() > j["error_bar"].get<double>());
}

TEST_CASE("match, mesh and fem chain through files") {
  CHECK(run("match \"" + data("disk_minus_square.json") + "\"").code == 0);
  fs::create_directories("cli_out");
  REQUIRE(run("mesh --domain \"" + data("sampled_annulus.json") + "\" --ntheta 64 --nr 6 --out cli_out/mesh.json").code == 0);
  REQUIRE(fs::exists("cli_out/mesh.json"));
  const auto f = run("fem --mesh cli_out/mesh.json --inner robin:1 --outer robin:1 --levels 1 --json");
  CHECK(f.code == 0);
  CHECK(nlohmann::json::parse(f.out)["lambda"].get<double>() > 0.0);
}

TEST_CASE("config file values apply and thread count is honored") {
  fs::create_directories("cli_out/cfg");
  {
    std::ofstream cfg("cli_out/config.json");
    cfg << R"({"grid": [1.5], "out_dir": "cli_out/cfg"})";
  }
  const auto r = run("suite shell-tables --config cli_out/config.json --threads 1");
  CHECK(r.code == 0);
  const std::string csv = slurp("cli_out/cfg/shell-tables_nr_N3_h5.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);

  fs::create_directories("cli_out/cfg_bad");
  {
    std::ofstream cfg("cli_out/bad.json");
    cfg << R"({"gird": [1.5]})";
  }
  CHECK(run("suite shell-tables --config cli_out/bad.json").code == 2);
}

TEST_CASE("morse3d classification") {
  const auto r = run("morse3d --classify");
  CHECK(r.code == 0);
  CHECK(r.out.find("index") != std::string::npos);
}
