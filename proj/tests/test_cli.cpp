#include "separ/harness.hpp"

#include <doctest.h>
#include <json.hpp>

#include <array>
#include <cstdio>
#include <fstream>
#include <string>
#include <sys/wait.h>

using namespace separ;

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  const std::string command = std::string(SEPAR_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe)) out += buf.data();
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

}  // namespace

TEST_CASE("test subcommand") {
  write_dataset("cli_gaussian.csv", sample_matrix_normal(300, 3, 3, 2), true);

  const Run norm = run("test --p1 3 --p2 3 --method norm cli_gaussian.csv");
  CHECK(norm.code == 0);
  CHECK(norm.out.find("*chi2_25 + ") != std::string::npos);
  CHECK(norm.out.find("*chi2_9") != std::string::npos);
  CHECK(norm.out.find("p-value") != std::string::npos);

  const Run both = run("test --p1 3 --p2 3 --method both --format json cli_gaussian.csv");
  CHECK(both.code == 0);
  const auto json = nlohmann::json::parse(both.out);
  REQUIRE(json["tests"].size() == 2);
  CHECK(json["tests"][0]["method"] == "norm");
  CHECK(json["tests"][1]["method"] == "wald");

  CHECK(run("test --p1 3 --p2 3 --method all cli_gaussian.csv").out.find("[lrt]") !=
        std::string::npos);
}

TEST_CASE("input errors exit with 2") {
  {
    std::ofstream bad("cli_bad.csv");
    bad << "1,2,3,4\n5,6,x,8\n";
  }
  const Run r = run("test --p1 2 --p2 2 cli_bad.csv");
  CHECK(r.code == 2);
  CHECK(r.out.find("line 2") != std::string::npos);
  CHECK(run("test --p1 3 --p2 3 cli_bad.csv").code == 2);
  CHECK(run("test --p1 2 --p2 2 missing.csv").code == 2);
  CHECK(run("test --p1 2 --p2 2 --method nope cli_bad.csv").code == 2);
  CHECK(run("frobnicate").code == 2);
}

TEST_CASE("simulate writes the rejection table") {
  {
    std::ofstream config("cli_sim.yaml");
    config << "dims: [[2, 2]]\nsample_sizes: [30]\nnus: [.inf]\ntaus: [0]\n"
              "replicates: 20\nmethods: [norm]\nmaster_seed: 3\n";
  }
  const Run r = run("simulate --config cli_sim.yaml --out cli_sim.csv");
  CHECK(r.code == 0);
  std::ifstream in("cli_sim.csv");
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header == "p1,p2,nu,n,tau,method,rejections,replicates,rate,failures,seed");
  CHECK(row.rfind("2,2,inf,30,0,norm,", 0) == 0);

  const Run seeded = run("simulate --config cli_sim.yaml --seed 4");
  CHECK(seeded.code == 0);
  CHECK(seeded.out.find("p1,p2,nu") == 0);
  CHECK(run("simulate --config missing.yaml").code == 2);
}

TEST_CASE("verify reports pass lines") {
  const Run r = run("verify --suite mixture-cdf --seed 1");
  CHECK(r.code == 0);
  CHECK(r.out.find("PASS") != std::string::npos);
  CHECK(r.out.find("FAIL") == std::string::npos);
  CHECK(run("verify --suite nope").code == 2);
}
