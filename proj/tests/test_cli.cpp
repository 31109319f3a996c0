#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct CmdResult {
  int exit_code;
  std::string out;
};

CmdResult run_cli(const std::string& args) {
  const std::string out_file = "cli_out.tmp";
  const std::string cmd = std::string(MRAMSIM_CLI_PATH) + " " + args + " >" + out_file + " 2>&1";
  const int rc = std::system(cmd.c_str());
  std::ifstream is(out_file);
  std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  std::filesystem::remove(out_file);
  return {WEXITSTATUS(rc), text};
}

std::string slurp(const std::string& path) {
  std::ifstream is(path);
  return std::string((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
}

} // namespace

TEST_CASE("usage errors exit 2 and list valid ids") {
  CHECK(run_cli("simulate --design bogus").exit_code == 2);
  const auto r = run_cli("simulate --design bogus");
  CHECK(r.out.find("valid ids") != std::string::npos);
  CHECK(run_cli("montecarlo --design vsa-1ref --samples 0").exit_code == 2);
  CHECK(run_cli("nosuchcommand").exit_code == 2);
  CHECK(run_cli("simulate").exit_code == 2);
}

TEST_CASE("simulate a user netlist with a waveform dump") {
  const std::string netlist = std::string(MRAMSIM_NETLIST_DIR) + "/rc.sp";
  const auto r = run_cli("simulate --netlist " + netlist + " --dump-waves cli_waves.tmp.csv");
  REQUIRE(r.exit_code == 0);
  const std::string csv = slurp("cli_waves.tmp.csv");
  CHECK(csv.rfind("t,", 0) == 0); // header starts with the time column
  CHECK(csv.find("a") != std::string::npos);
  std::filesystem::remove("cli_waves.tmp.csv");
}

TEST_CASE("montecarlo runs are deterministic and produce the report files") {
  const std::string args =
      "montecarlo --design vsa-1ref --state P --samples 8 --seed 7 --out cli_mc.tmp";
  const auto r1 = run_cli(args);
  REQUIRE(r1.exit_code == 0);
  CHECK(r1.out.find("error_count") != std::string::npos);
  const std::string csv1 = slurp("cli_mc.tmp.csv");
  const std::string json1 = slurp("cli_mc.tmp.json");

  const auto r2 = run_cli(args);
  REQUIRE(r2.exit_code == 0);
  CHECK(slurp("cli_mc.tmp.csv") == csv1); // byte-identical
  CHECK(slurp("cli_mc.tmp.json") == json1);

  // row count matches the sample count
  int rows = 0;
  std::istringstream is(csv1);
  std::string line;
  std::getline(is, line);
  while (std::getline(is, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 8);

  std::filesystem::remove("cli_mc.tmp.csv");
  std::filesystem::remove("cli_mc.tmp.json");
}

TEST_CASE("histogram renders an svg") {
  const auto r = run_cli("histogram --quantity resistance --state P --samples 500 --out cli_hist.tmp.svg");
  REQUIRE(r.exit_code == 0);
  const std::string svg = slurp("cli_hist.tmp.svg");
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("n=500") != std::string::npos);
  std::filesystem::remove("cli_hist.tmp.svg");
}
