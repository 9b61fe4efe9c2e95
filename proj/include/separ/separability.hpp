#pragma once

// End-to-end separability tests: the squared-norm test, its Wald-type
// version and the Gaussian likelihood-ratio benchmark.

#include "separ/covariance.hpp"
#include "separ/moments.hpp"
#include "separ/null_distribution.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace separ {

enum class Method { norm, wald, lrt };

std::string_view to_string(Method method) noexcept;
/// Parses "norm", "wald" or "lrt".
std::optional<Method> parse_method(std::string_view name) noexcept;

struct TestConfig {
  std::vector<double> levels{0.01, 0.05, 0.10};
  FlipFlopOptions flip_flop{};
  double mixture_tol = 1e-8;
};

struct ChiSquareLaw {
  long df;
};

using NullLaw = std::variant<MixtureSpec, ChiSquareLaw>;

std::string describe(const NullLaw& law);

struct TestDiagnostics {
  int flip_flop_iterations = 0;
  double flip_flop_residual = 0.0;
  std::optional<double> t1;
  std::optional<double> t2;
  bool t2_truncated = false;
  std::vector<std::string> warnings;
};

struct TestReport {
  Method method = Method::norm;
  double statistic = 0.0;
  NullLaw null_law;
  double p_value = 1.0;
  /// level -> (p_value < level)
  std::map<double, bool> reject_at;
  TestDiagnostics diagnostics;
};

/// Shared preparation for the three tests on one sample: S_n, the flip-flop
/// fit, V_n and (lazily) the moment estimates. Construction validates the
/// sample size and throws SampleTooSmall unless n - 1 > p1 p2.
///
/// Samples with p1 = 1 or p2 = 1 are separable by construction; every test
/// then reports statistic 0 and p-value 1 with a warning instead of failing.
class SeparabilityAnalysis {
 public:
  explicit SeparabilityAnalysis(const MatrixSample& sample, TestConfig config = {});

  TestReport norm_test();
  TestReport wald_test();
  TestReport lrt_test();
  TestReport run(Method method);

  bool trivially_separable() const noexcept { return trivial_; }
  const Matrix& sample_covariance() const noexcept { return sn_; }
  const SeparableFit& fit() const noexcept { return fit_; }
  const Matrix& v() const noexcept { return v_; }
  const MomentEstimates& moments();

 private:
  TestReport finish(Method method, double statistic, NullLaw law, double p_value,
                    std::vector<std::string> warnings) const;
  TestReport trivial_report(Method method) const;

  const MatrixSample& sample_;
  TestConfig config_;
  bool trivial_ = false;
  Matrix sn_;
  SeparableFit fit_;
  Matrix v_;
  std::optional<MomentEstimates> moments_;
};

TestReport norm_test(const MatrixSample& sample, const TestConfig& config = {});
TestReport wald_test(const MatrixSample& sample, const TestConfig& config = {});
TestReport lrt_test(const MatrixSample& sample, const TestConfig& config = {});

/// Free parameters of an unstructured minus a separable covariance:
/// p(p+1)/2 - p1(p1+1)/2 - p2(p2+1)/2 + 1 with p = p1 p2.
long lrt_df(int p1, int p2);

/// Gaussian LRT statistic n {log det(s2 (x) s1) - log det(S_n)} for any
/// flip-flop solution pair; invariant under (s1, s2) -> (c s1, s2 / c).
double lrt_statistic(const Matrix& sn, const Matrix& s1, const Matrix& s2, Index n);

}  // namespace separ
