// separ: separability tests for matrix-valued data.
//
//   separ test --p1 3 --p2 3 --method both data.csv
//   separ simulate --config configs/quick.yaml --out rates.csv
//   separ verify --suite all --seed 1
//
// Exit codes: 0 success, 2 input error, 3 numerical failure,
// 4 verification failure.

#include "separ/error.hpp"
#include "separ/harness.hpp"
#include "separ/verification.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>

namespace {

constexpr int kInputError = 2;
constexpr int kNumericalError = 3;
constexpr int kVerificationFailure = 4;

int exit_code(separ::ErrorKind kind) {
  using separ::ErrorKind;
  switch (kind) {
    case ErrorKind::NotPositiveDefinite:
    case ErrorKind::SingularIterate:
    case ErrorKind::NoConvergence:
    case ErrorKind::InvalidMoments:
    case ErrorKind::QuadratureFailure:
      return kNumericalError;
    default:
      return kInputError;
  }
}

std::vector<separ::Method> expand_methods(const std::string& name) {
  using separ::Method;
  if (name == "both") return {Method::norm, Method::wald};
  if (name == "all") return {Method::norm, Method::wald, Method::lrt};
  return {*separ::parse_method(name)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tests for separable (Kronecker) covariance structure of matrix-valued data"};
  app.require_subcommand(1);

  int p1 = 0;
  int p2 = 0;
  std::string method = "both";
  std::vector<double> levels{0.01, 0.05, 0.10};
  std::string format = "text";
  std::string data_path;
  auto* test = app.add_subcommand("test", "Run separability tests on a CSV dataset");
  test->add_option("--p1", p1, "Rows of each observation")->required()->check(CLI::PositiveNumber);
  test->add_option("--p2", p2, "Columns of each observation")->required()->check(CLI::PositiveNumber);
  test->add_option("--method", method, "norm, wald, lrt, both (norm+wald) or all")
      ->check(CLI::IsMember({"norm", "wald", "lrt", "both", "all"}))
      ->capture_default_str();
  test->add_option("--level", levels, "Test level(s)")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  test->add_option("--format", format, "text or json")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
  test->add_option("file", data_path, "CSV file, one vec(X_i) per row (column-major)")
      ->required();

  std::string config_path;
  std::string out_path;
  std::uint64_t sim_seed = 0;
  bool quick = false;
  auto* simulate = app.add_subcommand("simulate", "Run the rejection-rate simulation grid");
  simulate->add_option("--config", config_path, "YAML grid definition (defaults to the full grid)");
  simulate->add_option("--out", out_path, "CSV output path (default: stdout)");
  auto* seed_opt = simulate->add_option("--seed", sim_seed, "Override master_seed");
  simulate->add_flag("--quick", quick, "At most 200 replicates and n <= 800");

  std::string suite = "all";
  std::uint64_t verify_seed = 1;
  auto* verify = app.add_subcommand("verify", "Monte Carlo checks of the moment formulas");
  verify->add_option("--suite", suite, "moments, fourth-moment-matrix, haar, mixture-cdf or all")
      ->check(CLI::IsMember({"moments", "fourth-moment-matrix", "haar", "mixture-cdf", "all"}))
      ->capture_default_str();
  verify->add_option("--seed", verify_seed, "Seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInputError;
  }

  try {
    if (*test) {
      const separ::MatrixSample sample = separ::read_dataset(data_path, p1, p2);
      separ::TestConfig config;
      config.levels = levels;
      separ::SeparabilityAnalysis analysis(sample, config);
      std::vector<separ::TestReport> reports;
      for (auto m : expand_methods(method)) reports.push_back(analysis.run(m));
      std::cout << (format == "json" ? separ::format_report_json(reports, sample)
                                     : separ::format_report_text(reports, sample));
      return 0;
    }

    if (*simulate) {
      separ::SimulationConfig config = config_path.empty()
                                           ? separ::SimulationConfig{}
                                           : separ::load_simulation_config(config_path);
      if (*seed_opt) config.master_seed = sim_seed;
      if (quick) config = separ::quick_profile(std::move(config));
      const separ::RejectionTable table = separ::run_simulation(config);
      if (out_path.empty()) {
        separ::write_rejection_csv(std::cout, table);
      } else {
        std::ofstream out(out_path);
        if (!out) throw separ::Error(separ::ErrorKind::InvalidArgument, "cannot write " + out_path);
        separ::write_rejection_csv(out, table);
      }
      return 0;
    }

    if (*verify) {
      const auto results = separ::run_verification(suite, verify_seed);
      bool all_passed = true;
      for (const auto& r : results) {
        all_passed = all_passed && r.passed;
        std::cout << (r.passed ? "PASS  " : "FAIL  ") << std::left << std::setw(22) << r.suite
                  << r.name << "  estimate=" << r.estimate << " reference=" << r.reference
                  << " error=" << r.error << " tol=" << r.tolerance << '\n';
      }
      return all_passed ? 0 : kVerificationFailure;
    }
  } catch (const separ::Error& e) {
    std::cerr << "separ: " << separ::to_string(e.kind()) << ": " << e.what() << '\n';
    return exit_code(e.kind());
  }
  return 0;
}
