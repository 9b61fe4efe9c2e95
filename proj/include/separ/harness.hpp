#pragma once

// Plumbing around the tests: CSV datasets, the rejection-rate simulation and
// report formatting.

#include "separ/samplers.hpp"
#include "separ/separability.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace separ {

/// One observation per row, p1 p2 comma-separated fields holding vec(X_i)
/// in column-major order. A first row with any non-numeric field is taken as
/// a header; blank lines are ignored. Throws ParseError (with the line
/// number) and DimensionMismatch.
MatrixSample read_dataset(std::istream& in, int p1, int p2);
MatrixSample read_dataset(const std::string& path, int p1, int p2);

/// Shortest round-trip decimal representation; read_dataset recovers the
/// sample bit for bit.
void write_dataset(std::ostream& out, const MatrixSample& sample, bool header = false);
void write_dataset(const std::string& path, const MatrixSample& sample, bool header = false);

struct SimulationConfig {
  std::vector<std::pair<int, int>> dims{{3, 3}, {5, 5}};
  std::vector<Index> sample_sizes{100, 200, 400, 800, 1600, 3200};
  std::vector<double> nus{3, 5, 7, kGaussianNu};
  std::vector<double> taus{0, 1, 2, 3, 4, 5};
  int replicates = 2000;
  double level = 0.05;
  std::vector<Method> methods{Method::norm, Method::wald, Method::lrt};
  std::uint64_t master_seed = 20240101;

  /// Throws InvalidArgument on an unusable grid.
  void validate() const;
};

/// YAML mapping with the keys of SimulationConfig; missing keys keep their
/// defaults, unknown keys are rejected. nus accept `.inf` (or "inf").
SimulationConfig parse_simulation_config(const std::string& yaml_text);
SimulationConfig load_simulation_config(const std::string& path);

/// At most 200 replicates and only sample sizes up to 800.
SimulationConfig quick_profile(SimulationConfig config);

struct RejectionRow {
  int p1;
  int p2;
  double nu;
  Index n;
  double tau;
  Method method;
  long rejections;
  /// Replicates that produced a decision (requested minus failures).
  long replicates;
  double rate;
  long failures;
  /// Experiment seed; replicate r used split_seed(master_seed, seed, r).
  std::uint64_t seed;
};

struct RejectionTable {
  std::vector<RejectionRow> rows;
};

/// Experiment identifier of one (p1, p2, nu, n) cell. It depends only on the
/// cell, so a cell draws the same data whatever else is in the grid.
std::uint64_t experiment_seed(int p1, int p2, double nu, Index n) noexcept;

/// Simulates every (dims, nu, n) cell with zero mean and identity covariances;
/// all taus and methods of a replicate share the same base draw. Replicates
/// run in parallel; results do not depend on the thread count.
RejectionTable run_simulation(const SimulationConfig& config);

/// Header p1,p2,nu,n,tau,method,rejections,replicates,rate,failures,seed.
void write_rejection_csv(std::ostream& out, const RejectionTable& table);

std::string format_report_text(const std::vector<TestReport>& reports, const MatrixSample& sample);
std::string format_report_json(const std::vector<TestReport>& reports, const MatrixSample& sample);

}  // namespace separ
