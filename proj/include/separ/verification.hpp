#pragma once

// Monte Carlo cross-checks of the closed-form moment results and of the
// mixture tail, shared by `separ verify` and the acceptance suite.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace separ {

struct CheckResult {
  std::string suite;
  std::string name;
  double estimate = 0.0;
  double reference = 0.0;
  /// |estimate - reference|, or the largest entrywise error.
  double error = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

/// Haar frame entry moments at p1 = 2, 3, 4 against 10^6 draws (tol 0.003).
std::vector<CheckResult> verify_haar(std::uint64_t seed);

/// Spherical moment relations for Gaussian and matrix-t(7) cores, the
/// Gaussian Frobenius moments at (2, 2) and the singular-value formulas at
/// (3, 2). Relations and formulas are accepted within 3 Monte Carlo standard
/// errors, the Frobenius moments within 1%.
std::vector<CheckResult> verify_moments(std::uint64_t seed);

/// Empirical E[(z (x) z)(z (x) z)^T] at (2, 2) against the closed form for a
/// Gaussian core (10^7 draws) and a fixed-singular-value core (10^6 draws),
/// entrywise within 0.01.
std::vector<CheckResult> verify_fourth_moment_matrix(std::uint64_t seed);

/// mixture_sf against 10^7-draw Monte Carlo (tol 0.001) and equal-weight
/// mixtures against the pooled chi-square (tol 1e-8).
std::vector<CheckResult> verify_mixture_cdf(std::uint64_t seed);

/// suite: haar, moments, fourth-moment-matrix, mixture-cdf or all.
std::vector<CheckResult> run_verification(std::string_view suite, std::uint64_t seed);

}  // namespace separ
