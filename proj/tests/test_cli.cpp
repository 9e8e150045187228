#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "tauber/cli.hpp"
#include "tauber/report.hpp"

using namespace tauber;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "tauber_cli_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("density command") {
  auto r = cli({"--no-log", "density", "--set", "ap:2,2", "--n", "1000"});
  REQUIRE(r.code == kExitOk);
  auto j = Json::parse(r.out);
  CHECK(j["exact"] == "1/2");
  CHECK(j["prefix_counts"].back() == Json::array({1000, 500}));

  r = cli({"--no-log", "density", "--set", "builtin:squares", "--n", "10000", "--checkpoints", "10000"});
  REQUIRE(r.code == kExitOk);
  CHECK(Json::parse(r.out)["prefix_counts"][0][1] == 100);

  r = cli({"--no-log", "density", "--set", "ap:3,3", "--n", "9", "--checkpoints", "3,9", "--format", "csv"});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.find("9,3") != std::string::npos);

  CHECK(cli({"--no-log", "density", "--set", "ap:(", "--n", "10"}).code == kExitParse);
  CHECK(cli({"--no-log", "density", "--set", "ap:2,2"}).code == kExitParse);
  CHECK(cli({"--no-log", "nonsense"}).code == kExitParse);
  CHECK(cli({"--no-log", "density", "--set", "ap:2,2", "--n", "10", "--format", "xml"}).code == kExitParse);
}

TEST_CASE("verdict and regularity commands") {
  auto r = cli({"--no-log", "verdict", "--ideal", "z", "--set", "builtin:squares"});
  REQUIRE(r.code == kExitOk);
  CHECK(Json::parse(r.out)["status"] == "In");
  r = cli({"--no-log", "verdict", "--ideal", "fin", "--set", "builtin:squares"});
  CHECK(Json::parse(r.out)["status"] == "NotIn");

  CHECK(cli({"--no-log", "regularity", "--matrix", "cesaro", "--rows", "1024"}).code == kExitOk);
  r = cli({"--no-log", "regularity", "--matrix", "rowdrop:cesaro:builtin:squares", "--rows", "1024"});
  CHECK(r.code == kExitPrecondition);
  CHECK(Json::parse(r.out)["r3"]["status"] == "Fails");
  CHECK(cli({"--no-log", "regularity", "--matrix", "rowdrop:cesaro:builtin:squares", "--under", "z", "--rows",
             "1024"})
            .code == kExitOk);
}

TEST_CASE("transform and metric commands") {
  auto r = cli({"--no-log", "transform", "--matrix", "cesaro", "--x", "alt", "--n", "4"});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out == "n,value,decimal,tail_bound\n1,0,0.000000000000,0\n2,1/2,0.500000000000,0\n"
                 "3,1/3,0.333333333333,0\n4,1/2,0.500000000000,0\n");

  r = cli({"--no-log", "metric", "--a", "id", "--b", "even", "--K", "30"});
  REQUIRE(r.code == kExitOk);
  auto j = Json::parse(r.out)["interval"];
  Rational lo = parse_rational(j["lo"].get<std::string>()), hi = parse_rational(j["hi"].get<std::string>());
  CHECK(lo <= Rational(2, 3));
  CHECK(Rational(2, 3) <= hi);
  CHECK(cli({"--no-log", "metric", "--a", "id", "--b", "gen:bogus"}).code == kExitParse);
}

TEST_CASE("escape, oscillate and demo commands") {
  auto r = cli({"--no-log", "escape", "--stem", "1,2", "--m", "10"});
  REQUIRE(r.code == kExitOk);
  auto j = Json::parse(r.out);
  CHECK(j["verified"] == true);
  CHECK(j["target_rows"] == Json::array({4, 5, 6, 7}));

  r = cli({"--no-log", "escape", "--row", "geometric", "--stem", "1", "--m", "5"});
  REQUIRE(r.code == kExitOk);
  CHECK(Json::parse(r.out)["verified"] == true);

  r = cli({"--no-log", "escape", "--ideal", "fin", "--matrix", "rowdrop:cesaro:builtin:squares"});
  CHECK(r.code == kExitPrecondition);

  r = cli({"--no-log", "oscillate", "--x", "alt", "--n", "256"});
  REQUIRE(r.code == kExitOk);
  CHECK(Json::parse(r.out)["gap"] == "1");
  CHECK(cli({"--no-log", "oscillate", "--x", "const:1"}).code == kExitPrecondition);

  r = cli({"--no-log", "--seed", "3", "demo", "--rounds", "2"});
  REQUIRE(r.code == kExitOk);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 2);
}

TEST_CASE("adversary and verify commands") {
  const auto cert = scratch("cert.json").string();
  auto r = cli({"--no-log", "adversary", "--matrix", "cesaro", "--n", "4096", "--out", cert});
  REQUIRE(r.code == kExitOk);
  CHECK(Json::parse(r.out)["self_audit"] == true);
  CHECK(cli({"--no-log", "verify", "--certificate", cert}).code == kExitOk);

  std::ifstream in(cert);
  Json doc = Json::parse(in);
  in.close();
  doc["upper"]["count"] = doc["upper"]["count"].get<Index>() + 1;
  const auto bad = scratch("bad.json").string();
  std::ofstream(bad) << canonical_dump(doc);
  r = cli({"--no-log", "verify", "--certificate", bad});
  CHECK(r.code == kExitVerification);
  CHECK_FALSE(Json::parse(r.out)["failures"].empty());

  std::ofstream(scratch("junk.json").string()) << "{not json";
  CHECK(cli({"--no-log", "verify", "--certificate", scratch("junk.json").string()}).code == kExitParse);

  CHECK(cli({"--no-log", "adversary", "--matrix", "rowdrop:cesaro:builtin:squares", "--n", "4096"}).code ==
        kExitPrecondition);
  r = cli({"--no-log", "adversary", "--matrix", "rowdrop:cesaro:builtin:squares", "--under", "z", "--n", "4096"});
  REQUIRE(r.code == kExitOk);
  CHECK(verify_certificate_json(Json::parse(r.out)).ok);
  CHECK(cli({"--no-log", "adversary", "--matrix", "cesaro", "--lower", "3/5", "--upper", "2/5"}).code ==
        kExitPrecondition);
}

TEST_CASE("game command") {
  const auto tr = scratch("transcript.jsonl").string();
  auto r = cli({"--no-log", "game", "--ideal", "z", "--rounds", "6", "--transcript", tr});
  REQUIRE(r.code == kExitOk);
  auto j = Json::parse(r.out);
  CHECK(j["legality_replay"] == true);
  CHECK(j["adjudication"]["outcome"] == "II_winning_evidence");
  std::ifstream in(tr);
  int lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  CHECK(lines == 6);

  r = cli({"--no-log", "game", "--ideal", "finxfin", "--rounds", "8", "--strategy-ii", "random", "--tournament",
           "3"});
  REQUIRE(r.code == kExitOk);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 4);
  CHECK(r.out.find("I_winning_evidence") != std::string::npos);

  CHECK(cli({"--no-log", "game", "--strategy-ii", "cheat"}).code == kExitParse);
  CHECK(cli({"--no-log", "game", "--ideal", "fin", "--strategy-i", "nu2", "--rounds", "2"}).code ==
        kExitIllegalMove);
}

TEST_CASE("determinism, config files and the run log") {
  const std::vector<std::string> args{"--no-log", "--seed", "11", "demo", "--rounds", "2"};
  CHECK(cli(args).out == cli(args).out);
  auto g = std::vector<std::string>{"--no-log", "--seed", "5", "game", "--strategy-ii", "random", "--rounds", "5"};
  CHECK(cli(g).out == cli(g).out);

  const auto cfg = scratch("run.cfg").string();
  std::ofstream(cfg) << "# defaults\nset = ap:3,3\nn = 300\ncheckpoints = 300\n";
  auto r = cli({"--no-log", "--config", cfg, "density"});
  REQUIRE(r.code == kExitOk);
  CHECK(Json::parse(r.out)["prefix_counts"][0] == Json::array({300, 100}));
  r = cli({"--no-log", "--config", cfg, "density", "--n", "30", "--checkpoints", "30"});
  CHECK(Json::parse(r.out)["prefix_counts"][0] == Json::array({30, 10}));
  std::ofstream(cfg) << "set ap:3,3\n";
  CHECK(cli({"--no-log", "--config", cfg, "density"}).code == kExitParse);

  const auto log = scratch("runs.jsonl");
  std::filesystem::remove(log);
  r = cli({"--run-log", log.string(), "--seed", "9", "density", "--set", "ap:2,2", "--n", "16"});
  REQUIRE(r.code == kExitOk);
  cli({"--run-log", log.string(), "density", "--set", "ap:(", "--n", "16"});
  std::ifstream in(log);
  std::vector<Json> records;
  for (std::string line; std::getline(in, line);) records.push_back(Json::parse(line));
  REQUIRE(records.size() == 2);
  CHECK(records[0]["seed"] == 9);
  CHECK(records[0]["subcommand"] == "density");
  CHECK(records[0]["config"]["set"] == "ap:2,2");
  CHECK(records[0]["output_sha256"] == sha256_hex(r.out));
  CHECK(records[0]["prng"] == "splitmix64/1");
  CHECK(records[1]["exit_code"] == kExitParse);
}
