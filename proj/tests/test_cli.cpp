#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "pir/cli.hpp"
#include "pir/server.hpp"
#include "pir/wire.hpp"

using namespace pir;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "pir");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("demo reproduces the worked examples") {
  auto r = cli({"demo", "--example", "1"});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "row 1: (1,2,4,2)"));
  CHECK(contains(r.out, "A_1 = X_1 + 2X_2 + 4X_3 + 2X_4"));
  CHECK(contains(r.out, "A_2 = 2X_2 + 3X_3 + X_4"));
  CHECK(contains(r.out, "match"));
  CHECK(contains(r.out, "rate 1/2"));

  r = cli({"demo", "--example", "2"});
  CHECK(contains(r.out, "row 3: (0,3,4,2)"));
  CHECK(contains(r.out, "X_1 = (A_1 + A_3 - Y) / 3"));

  r = cli({"demo", "--example", "3"});
  CHECK(contains(r.out, "Q_1 = (U={2,4,5}, V={2,2,1})"));
  CHECK(contains(r.out, "Q_2 = (U={1,3,2}, V={2,2,1})"));
  CHECK(contains(r.out, "X_1 = (A_2 - Y) / 2"));

  r = cli({"demo", "--example", "4"});
  CHECK(contains(r.out, "query bytes: 01010002000100"));
  CHECK(contains(r.out, "rate 1\n"));

  r = cli({"demo", "--example", "5"});
  CHECK(contains(r.out, "Q_1 = (U={1,4}, V={1,2})"));
  CHECK(contains(r.out, "Q_2 = (U={2,3}, V={1,2})"));

  for (const char* s : {"pcsi1", "pcsi2", "csi1", "csi2"}) {
    r = cli({"demo", s, "--K", "7", "--M", "3", "--q", "7", "--l", "2", "--seed", "9"});
    CHECK(r.code == 0);
    CHECK(contains(r.out, "match"));
  }
  CHECK(cli({"demo", "--example", "9"}).code == 2);
  CHECK(cli({"demo", "pcsi1", "--K", "4", "--M", "2", "--q", "3"}).code == 3);
}

TEST_CASE("audit verdicts set the exit code") {
  auto r = cli({"audit", "csi1", "--K", "5", "--M", "2", "--q", "3", "--privacy", "w"});
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["verdict"] == "holds");
  CHECK(j["deviation"] == "0/1");

  r = cli({"audit", "csi1", "--K", "5", "--M", "2", "--q", "3", "--privacy", "ws"});
  CHECK(r.code == 1);
  CHECK(nlohmann::json::parse(r.out)["verdict"] == "violated");

  CHECK(cli({"audit", "csi1", "--K", "6", "--M", "2", "--q", "5", "--privacy", "w", "--cap", "10"})
            .code == 3);
  CHECK(cli({"audit", "nope", "--K", "5", "--M", "2", "--q", "3", "--privacy", "w"}).code == 2);
}

TEST_CASE("table output") {
  auto r = cli({"table", "--K-max", "4"});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "pcsi1   scalar-linear     4   2    5  1/2"));
  r = cli({"table", "--K-max", "4", "--csv"});
  CHECK(contains(r.out, "pcsi1,general,4,2,1,2,0,1,2\n"));
}

TEST_CASE("usage errors") {
  CHECK(cli({}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({"audit", "csi1", "--K", "x"}).code == 2);
}

TEST_CASE("gen-db, then fetch against a live server") {
  const auto path = std::filesystem::temp_directory_path() / "pir_cli_test.db";
  REQUIRE(cli({"gen-db", "--K", "6", "--q", "7", "--l", "2", "--seed", "4", "--out", path.string()})
              .code == 0);
  Server server(wire::load_database(path));
  const auto addr = "127.0.0.1:" + std::to_string(server.start("127.0.0.1", 0));

  auto r = cli({"fetch", addr, "--db", path.string(), "--random", "20", "--seed", "5"});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "20/20 retrievals decoded correctly"));
  const auto again = cli({"fetch", addr, "--db", path.string(), "--random", "20", "--seed", "5"});
  CHECK(again.out == r.out);

  r = cli({"fetch", addr, "--setting", "csi1", "--M", "2", "--W", "1", "--S", "2", "3", "--C", "1",
           "2", "--db", path.string(), "--seed", "1"});
  CHECK(r.code == 0);

  server.stop();
  CHECK(cli({"fetch", addr, "--db", path.string(), "--random", "1"}).code == 3);
  std::filesystem::remove(path);
}
