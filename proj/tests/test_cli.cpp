#include <array>
#include <cstdio>
#include <fstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run dtl(const std::string& args) {
  Run r;
  const std::string cmd = std::string("'") + DTL_CLI + "' " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

const std::string kFile = std::string(DTL_DATA_DIR) + "/three_worlds.json";

}  // namespace

TEST_CASE("parse") {
  auto r = dtl("parse '[]p -> p'");
  CHECK(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["variables"] == json::array({"p"}));
  CHECK(j["length"].get<int>() > 0);

  CHECK(dtl("parse 'p &'").code == 65);
  CHECK(dtl("parse").code == 64);
  CHECK(dtl("frobnicate p").code == 64);
}

TEST_CASE("check-quasimodel") {
  auto r = dtl("check-quasimodel '" + kFile + "' '!(*[]p -> []*p)'");
  CHECK(r.code == 0);
  auto j = json::parse(r.out);
  CHECK(j["verdict"] == "valid");
  CHECK(j["satisfied_at"] == 0);

  const std::string broken = "/tmp/dtl_cli_broken.json";
  std::ofstream(broken) << R"({"worlds":[{"id":0,"type":["p","[]p","*[]p","*p","![]*p"]}],"g":[]})";
  r = dtl("check-quasimodel " + broken + " '*[]p -> []*p'");
  CHECK(r.code == 65);
  j = json::parse(r.out);
  CHECK(j["verdict"] == "invalid");
  CHECK_FALSE(j["report"].empty());

  CHECK(dtl("check-quasimodel /nonexistent.json p").code == 65);
}

TEST_CASE("eval") {
  const std::string model = "/tmp/dtl_cli_model.json";
  std::ofstream(model) << R"({"points":2,"order":[[0,0],[0,1],[1,1]],"f":[1,1],"valuation":{"p":[1]}})";
  const auto r = dtl("eval " + model + " 'Xp & !p'");
  CHECK(r.code == 0);
  CHECK(r.out.find("\"extension\":[0]") != std::string::npos);
}

TEST_CASE("verdicts and exit codes") {
  auto r = dtl("valid 'p | !p' --max-depth 0");
  CHECK(r.code == 0);
  CHECK(json::parse(r.out)["verdict"] == "VALID");

  r = dtl("valid p");
  CHECK(r.code == 0);
  CHECK(json::parse(r.out)["verdict"] == "NOT_VALID");

  r = dtl("sat '!(*[]p -> []*p)' --max-worlds 3 --budget-units 5");
  CHECK(r.code == 2);
  CHECK(json::parse(r.out)["verdict"] == "UNKNOWN");

  r = dtl("oracle '[]p -> Xp' --max-points 2");
  CHECK(r.code == 0);
  CHECK(json::parse(r.out)["verdict"] == "COUNTERMODEL");

  CHECK(dtl("oracle p --max-points 9").code == 64);
}

TEST_CASE("export-dot") {
  const auto r = dtl("export-dot '" + kFile + "'");
  CHECK(r.code == 0);
  CHECK(r.out.rfind("digraph", 0) == 0);
}
