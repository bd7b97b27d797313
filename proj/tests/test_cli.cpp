#include "doctest.h"

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <string>

#include "json.hpp"

namespace {

struct Run {
  int code = -1;
  std::string out;
};

const std::string data = NCS_DATA_DIR;

Run cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + NCS_CLI_PATH + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

nlohmann::json parsed(const Run& r) {
  nlohmann::json j;
  REQUIRE_NOTHROW(j = nlohmann::json::parse(r.out));
  return j;
}

}  // namespace

TEST_CASE("exit codes over the fixture corpus") {
  struct Case {
    std::string args;
    int code;
  };
  const Case cases[] = {
      {"check-positivity " + data + "/swap_f.json", 10},
      {"check-positivity " + data + "/zero.json", 0},
      {"check-positivity " + data + "/h1.json", 0},
      {"check-positivity " + data + "/h2.json", 10},
      {"slemma " + data + "/swap.json", 0},
      {"slemma " + data + "/refutable.json", 11},
      {"slemma-hereditary " + data + "/refutable_hereditary.json", 11},
      {"slemma " + data + "/missing_slater.json", 2},
      {"slemma " + data + "/slater_violated.json", 4},
      {"slemma " + data + "/dimension_mismatch.json", 3},
      {"check-positivity " + data + "/asymmetric.json", 2},
      {"check-positivity " + data + "/does_not_exist.json", 2},
      {"scalar-slemma " + data + "/scalar_certificate.json", 0},
      {"scalar-slemma " + data + "/scalar_counterexample.json", 11},
      {"homogenize " + data + "/homogenize.json", 0},
      {"homogenize " + data + "/homogenize_infeasible.json", 13},
      {"evaluate " + data + "/swap.json " + data + "/swap_point.json", 0},
      {"frobnicate", 2},
  };
  for (const auto& c : cases) {
    CAPTURE(c.args);
    const Run r = cli(c.args);
    CHECK(r.code == c.code);
    // JSON on stdout on every path
    parsed(r);
  }
}

TEST_CASE("positivity witness and SOS factor") {
  const auto bad = parsed(cli("check-positivity " + data + "/swap_f.json"));
  CHECK(bad["verdict"] == "not-psd");
  CHECK(bad["witness"]["value"].get<double>() < 0);
  const auto good = parsed(cli("check-positivity --sos " + data + "/h1.json"));
  CHECK(good["verdict"] == "psd");
  CHECK(good["sos"]["rank"] == 1);
}

TEST_CASE("emitted certificates re-verify") {
  const std::string cert = "cli_cert_swap.json";
  const Run r = cli("slemma -o " + cert + " " + data + "/swap.json");
  REQUIRE(r.code == 0);
  const auto j = parsed(r);
  CHECK(j["type"] == "cp-certificate");
  CHECK(j["options"]["seed"] == 42);
  const Run v = cli("verify " + cert + " " + data + "/swap.json");
  CHECK(v.code == 0);
  CHECK(parsed(v)["valid"] == true);
}

TEST_CASE("runs are reproducible bit for bit") {
  for (const char* f : {"/swap.json", "/refutable.json"}) {
    const Run a = cli("slemma " + data + f);
    const Run b = cli("slemma " + data + f);
    CHECK(a.out == b.out);
    const Run c = cli("slemma " + data + f, "NCSLEMMA_THREADS=2");
    CHECK(c.code == a.code);
  }
}

TEST_CASE("flags override file options") {
  const auto j = parsed(cli("slemma --seed 7 --budget 200 --tol 1e-9 " + data + "/swap.json"));
  CHECK(j["options"]["seed"] == 7);
  CHECK(j["options"]["budget"] == 200);
  CHECK(j["options"]["tol"].get<double>() == 1e-9);
}

TEST_CASE("projected evaluation shows the negative entry") {
  const Run r =
      cli("evaluate --project " + data + "/commutator.json " + data + "/commutator_point.json");
  REQUIRE(r.code == 0);
  const auto j = parsed(r);
  CHECK(j["f"][2][2].get<double>() == doctest::Approx(-1.0).epsilon(1e-12));
  const Run no_q = cli("evaluate --project " + data + "/swap.json " + data +
                       "/swap_point.json");
  CHECK(no_q.code == 2);
}
