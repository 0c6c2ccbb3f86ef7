#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <sys/wait.h>

#include "cli.hpp"

using namespace dilemma;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("dilemma_cli_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("argument parsers") {
  CHECK(cli::parse_payoffs("4,0,6,1") == std::array<double, 4>{4, 0, 6, 1});
  CHECK(cli::parse_payoffs("3.5,-1,5,0.5")[1] == -1);
  CHECK_THROWS_AS(cli::parse_payoffs("4,0,6"), std::invalid_argument);
  CHECK_THROWS_AS(cli::parse_payoffs("4,0,6,x"), std::invalid_argument);
  CHECK_THROWS_AS(cli::parse_payoffs("4,0,6,1,"), std::invalid_argument);

  const auto grid = cli::parse_gamma_grid("0.1:0.3:0.1");
  REQUIRE(grid.size() == 3);
  CHECK(grid[2] == doctest::Approx(0.3));
  CHECK(cli::parse_gamma_grid("0.01:0.99:0.01").size() == 99);
  CHECK(cli::parse_gamma_grid("0.5:0.5:0.1").size() == 1);
  CHECK_THROWS_AS(cli::parse_gamma_grid("0.1:1.0:0.1"), std::invalid_argument);
  CHECK_THROWS_AS(cli::parse_gamma_grid("0.3:0.1:0.1"), std::invalid_argument);
  CHECK_THROWS_AS(cli::parse_gamma_grid("0.1:0.3:0"), std::invalid_argument);
  CHECK_THROWS_AS(cli::parse_gamma_grid("0.1:0.3"), std::invalid_argument);
}

TEST_CASE("seed resolution") {
  ::unsetenv("DILEMMA_SEED");
  CHECK(cli::resolve_seed("") == 0);
  CHECK(cli::resolve_seed("42") == 42);
  ::setenv("DILEMMA_SEED", "7", 1);
  CHECK(cli::resolve_seed("") == 7);
  CHECK(cli::resolve_seed("9") == 9);
  ::setenv("DILEMMA_SEED", "seven", 1);
  CHECK_THROWS_AS(cli::resolve_seed(""), std::invalid_argument);
  ::unsetenv("DILEMMA_SEED");
  CHECK_THROWS_AS(cli::resolve_seed("-3"), std::invalid_argument);
}

TEST_CASE("expected visits") {
  const auto opp = swap_perspective(strategies::kWsls).to_memory_one();
  const auto v = cli::expected_visits(strategies::kWsls, opp, 0.0, StateProfile::CC, 500);
  CHECK(v[QTable::flat(Action::C, StateProfile::CC)] == doctest::Approx(500));
  double total = 0;
  for (double x : cli::expected_visits(strategies::kWsls, opp, 0.01, StateProfile::DD, 1000)) total += x;
  CHECK(total == doctest::Approx(1000));
  // Against Grim the cooperative states are transient.
  const auto grim = swap_perspective(strategies::kGrim).to_memory_one();
  const auto g = cli::expected_visits(strategies::kGrim, grim, 0.01, StateProfile::CC, 1000000);
  CHECK(g[QTable::flat(Action::D, StateProfile::CC)] < 1.0);
  CHECK(g[QTable::flat(Action::D, StateProfile::DD)] > 900000);
}

TEST_CASE("best-response command") {
  SUBCASE("WSLS at 0.9") {
    const auto r = run({"best-response", "--opp", "WSLS", "--gamma", "0.9", "--payoffs", "4,0,6,1"});
    CHECK(r.code == 0);
    CHECK(r.out.find("policy: WSLS (1001)") != std::string::npos);
    for (const char* line : {"q(C,CC) = 40\n", "q(C,CD) = 33.3\n", "q(C,DC) = 33.3\n", "q(C,DD) = 40\n",
                             "q(D,CC) = 39.3\n", "q(D,CD) = 37\n", "q(D,DC) = 37\n", "q(D,DD) = 39.3\n"}) {
      CHECK(r.out.find(line) != std::string::npos);
    }
    CHECK(r.out.find("ties: none") != std::string::npos);
    CHECK(r.out.find("region: wsls-1") != std::string::npos);
  }
  SUBCASE("TFT by bits below (P-S)/(T-P)") {
    const auto r = run({"best-response", "--opp", "1010", "--gamma", "0.15"});
    CHECK(r.code == 0);
    CHECK(r.out.find("policy: All-D (0000)") != std::string::npos);
    CHECK(r.out.find("region: tft-6") != std::string::npos);
  }
  SUBCASE("TFT at 0.2 sits on (P-S)/(T-P) for these payoffs") {
    const auto r = run({"best-response", "--opp", "1010", "--gamma", "0.2"});
    CHECK(r.code == 0);
    CHECK(r.out.find("policy: All-D (0000)") != std::string::npos);
    CHECK(r.out.find("ties: DC DD") != std::string::npos);
    CHECK(r.err.find("boundary") != std::string::npos);
  }
  SUBCASE("All-C is exploited") {
    const auto r = run({"best-response", "--opp", "ALLC"});
    CHECK(r.out.find("policy: All-D (0000)") != std::string::npos);
  }
  SUBCASE("stochastic opponent") {
    const auto r = run({"best-response", "--opp", "0.9,0.1,0.9,0.1", "--gamma", "0.5"});
    CHECK(r.code == 0);
    CHECK(r.out.find("opponent: 0.9,0.1,0.9,0.1") != std::string::npos);
    CHECK(r.out.find("region:") == std::string::npos);
  }
  SUBCASE("boundary gamma") {
    const auto loose = run({"best-response", "--opp", "GRIM", "--gamma", "0.4"});
    CHECK(loose.code == 0);
    CHECK(loose.err.find("warning") != std::string::npos);
    CHECK(loose.out.find("ties: CC") != std::string::npos);
    CHECK(run({"best-response", "--opp", "GRIM", "--gamma", "0.4", "--strict"}).code == cli::kExitBoundary);
  }
  SUBCASE("CSV output") {
    const fs::path dir = scratch("br");
    fs::create_directories(dir);
    CHECK(run({"best-response", "--opp", "GRIM", "--out", (dir / "q.csv").string()}).code == 0);
    CHECK(slurp(dir / "q.csv").rfind("action,state,q\nC,CC,40\n", 0) == 0);
    CHECK(run({"best-response", "--opp", "GRIM", "--out", (dir / "no" / "q.csv").string()}).code == cli::kExitIo);
    fs::remove_all(dir);
  }
}

TEST_CASE("invalid arguments exit with 2") {
  const auto bad_name = run({"best-response", "--opp", "NICE"});
  CHECK(bad_name.code == cli::kExitInvalidArgs);
  CHECK(bad_name.err.find("ALLC") != std::string::npos);
  CHECK(run({"best-response", "--opp", "WSLS", "--payoffs", "4,0,9,1"}).code == cli::kExitInvalidArgs);
  CHECK(run({"best-response", "--opp", "WSLS", "--gamma", "1"}).code == cli::kExitInvalidArgs);
  CHECK(run({"best-response"}).code == cli::kExitInvalidArgs);
  CHECK(run({"scan", "--gamma-grid", "0.5:0.1:0.1"}).code == cli::kExitInvalidArgs);
  CHECK(run({"qlearn", "--eta", "0"}).code == cli::kExitInvalidArgs);
  CHECK(run({"frobnicate"}).code == cli::kExitInvalidArgs);
  CHECK(run({}).code == cli::kExitInvalidArgs);
}

TEST_CASE("help lists every strategy name and the bit order") {
  const auto r = run({"--help"});
  CHECK(r.code == 0);
  for (const auto& sel : strategy_selectors()) CHECK(r.out.find(std::string(sel.key)) != std::string::npos);
  CHECK(r.out.find("CC,CD,DC,DD") != std::string::npos);
  for (const char* cmd : {"best-response", "scan", "qlearn", "reproduce"}) CHECK(r.out.find(cmd) != std::string::npos);
}

TEST_CASE("scan command") {
  SUBCASE("verdict table") {
    const auto r = run({"scan", "--payoffs", "4,0,6,1", "--table1", "--gamma", "0.9"});
    CHECK(r.code == 0);
    std::istringstream lines(r.out);
    std::string line;
    std::set<int> yes;
    while (std::getline(lines, line)) {
      int id = 0;
      char bits[5];
      if (std::sscanf(line.c_str(), "%d %4s", &id, bits) == 2 && line.find(" Yes ") != std::string::npos) yes.insert(id);
    }
    CHECK(yes == std::set<int>{7, 8, 16});
  }
  SUBCASE("onsets") {
    const auto r = run({"scan"});
    CHECK(r.out.find("WSLS joins at 0.666666") != std::string::npos);
    CHECK(r.out.find("Grim joins at 0.4") != std::string::npos);
    CHECK(r.out.find("0.99 WSLS Grim All-D\n") != std::string::npos);
  }
  SUBCASE("T+P>2R never admits WSLS") {
    const auto r = run({"scan", "--payoffs", "3,0,5,2"});
    CHECK(r.code == 0);
    CHECK(r.out.find("WSLS") == std::string::npos);
  }
  SUBCASE("CSV output") {
    const fs::path dir = scratch("scan");
    CHECK(run({"scan", "--table1", "--out", dir.string()}).code == 0);
    const std::string table = slurp(dir / "table1.csv");
    CHECK(table.rfind(std::string(cli::kTableHeader) + "\n", 0) == 0);
    CHECK(table.find("\n7,1001,WSLS,") != std::string::npos);
    CHECK(fs::exists(dir / "scan.csv"));
    CHECK(fs::exists(dir / "onsets.csv"));
    fs::remove_all(dir);
  }
}

TEST_CASE("qlearn command") {
  const fs::path dir = scratch("ql");
  const auto r = run({"qlearn", "--opp", "WSLS", "--gamma", "0.2", "--realizations", "20", "--steps", "20000",
                      "--seed", "3", "--out", dir.string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("modal policy: All-D (0000)") != std::string::npos);
  CHECK(slurp(dir / "trace.csv").rfind(std::string(kTraceHeader) + "\n", 0) == 0);
  CHECK(slurp(dir / "tally.csv").find("0000,") != std::string::npos);

  const auto grim = run({"qlearn", "--opp", "GRIM", "--gamma", "0.2", "--realizations", "10", "--steps", "5000",
                         "--out", dir.string()});
  CHECK(grim.out.find("note:") != std::string::npos);

  const auto alt = run({"qlearn", "--opp", "ALLD", "--gamma", "0.5", "--realizations", "5", "--steps", "5000",
                        "--phases", "2", "--out", dir.string()});
  CHECK(alt.code == 0);
  CHECK(fs::exists(dir / "phase2_trace.csv"));
  CHECK(run({"qlearn", "--opp", "0.5,0.5,0.5,0.5", "--phases", "1", "--out", dir.string()}).code ==
        cli::kExitInvalidArgs);

  // A regular file where the output directory should be.
  std::ofstream(dir / "blocker") << "x";
  CHECK(run({"qlearn", "--realizations", "2", "--steps", "100", "--out", (dir / "blocker").string()}).code ==
        cli::kExitIo);
  fs::remove_all(dir);
}

TEST_CASE("reproduce is deterministic and its manifest is complete") {
  const fs::path a = scratch("rep_a");
  const fs::path b = scratch("rep_b");
  for (const auto& dir : {a, b}) {
    CHECK(run({"reproduce", "--quick", "--steps", "3000", "--seed", "11", "--out", dir.string()}).code == 0);
  }
  std::set<std::string> written;
  for (const auto& e : fs::directory_iterator(a)) written.insert(e.path().filename().string());
  CHECK(written.size() == 8);

  std::istringstream manifest(slurp(a / "manifest.csv"));
  std::string line;
  std::getline(manifest, line);
  CHECK(line == cli::kManifestHeader);
  std::set<std::string> listed{"manifest.csv"};
  while (std::getline(manifest, line)) listed.insert(line.substr(0, line.find(',')));
  CHECK(listed == written);

  for (const auto& name : written) CHECK(slurp(a / name) == slurp(b / name));
  CHECK(slurp(a / "manifest.csv").find("40 39.3 37 33.3") != std::string::npos);
  fs::remove_all(a);
  fs::remove_all(b);
}

#ifdef DILEMMA_CLI_PATH
TEST_CASE("installed binary reports exit codes") {
  const std::string bin = DILEMMA_CLI_PATH;
  const auto status = [&](const std::string& args) {
    const int raw = std::system((bin + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  CHECK(status("--help") == 0);
  CHECK(status("best-response --opp WSLS") == 0);
  CHECK(status("best-response --opp NICE") == 2);
  CHECK(status("best-response --opp GRIM --gamma 0.4 --strict") == 3);
}
#endif
