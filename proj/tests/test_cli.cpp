#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

std::string cli() {
  const char* path = std::getenv("RS2ACF_CLI");
  REQUIRE_MESSAGE(path != nullptr, "RS2ACF_CLI must point at the binary");
  return path;
}

int run(const std::string& args) {
  const std::string cmd = cli() + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  return nlohmann::json::parse(in);
}

}  // namespace

TEST_CASE("invalid configurations exit nonzero") {
  CHECK(run("cluster --method nosuch --blobs c=2,n=6,d=4,sep=5,std=1") != 0);
  CHECK(run("cluster --seed 1") != 0);             // no data source
  CHECK(run("cluster --data /nonexistent.csv") != 0);
  CHECK(run("trace --blobs c=2,n=6,d=4,sep=5,std=1 --percentages \"\"") != 0);
}

TEST_CASE("cluster run writes a well-formed document") {
  const std::string out = "/tmp/rs2acf_cli_test.json";
  CHECK(run("cluster --blobs c=2,n=8,d=6,sep=8,std=1 --seed 5 --restarts 4 --max-iter 20 --out " +
            out) == 0);
  const auto doc = read_json(out);
  CHECK(doc["run_config"]["method"] == "rs2acf");
  CHECK(doc["run_config"]["seed"] == 5);
  CHECK(doc["metrics"]["ac"]["per_run"].size() == 4);
  const double ac = doc["metrics"]["ac"]["mean"].get<double>();
  CHECK(ac >= 0.0);
  CHECK(ac <= 1.0);
  CHECK(doc["timings_ms"].empty());
  std::remove(out.c_str());
}

TEST_CASE("single-cluster evaluation reports zero nmi by convention") {
  const std::string out = "/tmp/rs2acf_cli_k1.json";
  CHECK(run("cluster --blobs c=2,n=8,d=6,sep=8,std=1 --seed 5 --clusters 1 --restarts 3 "
            "--max-iter 20 --out " +
            out) == 0);
  const auto doc = read_json(out);
  CHECK(doc["metrics"]["nmi"]["mean"].get<double>() == 0.0);
  std::remove(out.c_str());
}
