#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "weylsys/cli.hpp"

using weylsys::run_cli;
using Json = nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

const std::string data = WEYLSYS_DATA_DIR;

}  // namespace

TEST_CASE("cli: count") {
  const auto r = run({"count", "--system", data + "/pyth.json", "--P", "5"});
  REQUIRE(r.code == 0);
  const auto doc = Json::parse(r.out);
  CHECK(doc["command"] == "count");
  CHECK(doc["outputs"]["count"] == 57);
  CHECK(doc["provenance"]["seed"] == 1);
  CHECK(doc["provenance"]["workers"] == 1);
  CHECK_FALSE(doc.contains("envelope"));
}

TEST_CASE("cli: expsum at alpha = 0") {
  const auto r = run({"expsum", "--form", "x1^2 - x2*x3", "--vars", "3", "--alpha", "0", "--P", "3"});
  REQUIRE(r.code == 0);
  const auto v = Json::parse(r.out)["outputs"]["value"];
  CHECK(v[0] == 343.0);
  CHECK(v[1] == 0.0);
}

TEST_CASE("cli: pencil rank of the 13-variable pair") {
  const auto r = run({"pencil-rank", "--system", data + "/example13.json", "--height", "10"});
  REQUIRE(r.code == 0);
  const auto out = Json::parse(r.out)["outputs"];
  CHECK(out["min_rank_found"] == 13);
  CHECK(out["certified"] == true);
}

TEST_CASE("cli: rational roots") {
  auto r = run({"rational-roots", "--coeffs", "2,7,-13,7,-15"});
  REQUIRE(r.code == 0);
  CHECK(Json::parse(r.out)["outputs"]["roots"] == Json::parse(R"([["3","2"],["5","-1"]])"));
  r = run({"rational-roots", "--system", data + "/example13.json"});
  REQUIRE(r.code == 0);
  CHECK(Json::parse(r.out)["outputs"]["num_roots"] == 0);
}

TEST_CASE("cli: exit codes and error documents") {
  auto r = run({"count", "--system", data + "/pyth.json", "--P", "100000", "--ceiling", "1000"});
  CHECK(r.code == 2);
  CHECK(r.out.empty());
  CHECK(Json::parse(r.err)["error"]["kind"] == "feasibility");

  r = run({"count", "--form", "x1^2 + 2x2^2", "--vars", "2", "--P", "3"});
  CHECK(r.code == 1);
  CHECK(Json::parse(r.err)["error"]["position"] == 8);

  r = run({"count", "--system", "/nonexistent.json", "--P", "3"});
  CHECK(r.code == 1);
  r = run({"frobnicate"});
  CHECK(r.code == 1);
  CHECK(Json::parse(r.err)["error"]["kind"] == "usage");
  r = run({"constants", "--system", data + "/fermat_cubic.json"});
  CHECK(r.code == 1);
  r = run({"expsum", "--system", data + "/example13.json", "--alpha", "1,2,3", "--P", "2"});
  CHECK(r.code == 1);
}

TEST_CASE("cli: alpha broadcast and csv") {
  const std::string csv = "cli_test_sweep.csv";
  auto r = run({"count", "--system", data + "/meyer5.json", "--P", "2,4", "--csv", csv});
  REQUIRE(r.code == 0);
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "P,rho,main_term,ratio");
  std::string row;
  std::getline(in, row);
  CHECK(row.rfind("2,", 0) == 0);
  r = run({"expsum", "--system", data + "/degenerate_pair.json", "--alpha", "1/3", "--P", "2"});
  REQUIRE(r.code == 0);
  CHECK(Json::parse(r.out)["inputs"]["alpha"] == Json::parse(R"(["1/3","1/3"])"));
}

TEST_CASE("cli: identical runs give identical bytes") {
  const std::vector<std::string> args{"singular-integral", "--system", data + "/pyth.json", "--samples", "20000", "--seed", "5"};
  const auto a = run(args), b = run(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const auto e = run({"count", "--system", data + "/pyth.json", "--P", "3", "--envelope"});
  CHECK(Json::parse(e.out)["envelope"].contains("timestamp"));
}
