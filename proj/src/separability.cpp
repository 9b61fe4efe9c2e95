#include "separ/separability.hpp"

#include "separ/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace separ {
namespace {

double log_det_spd(const Matrix& a, const char* what) {
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::NotPositiveDefinite, std::string(what) + " is not positive definite");
  }
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

}  // namespace

std::string_view to_string(Method method) noexcept {
  switch (method) {
    case Method::norm: return "norm";
    case Method::wald: return "wald";
    case Method::lrt: return "lrt";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) noexcept {
  if (name == "norm") return Method::norm;
  if (name == "wald") return Method::wald;
  if (name == "lrt") return Method::lrt;
  return std::nullopt;
}

std::string describe(const NullLaw& law) {
  if (const auto* mixture = std::get_if<MixtureSpec>(&law)) return mixture->describe();
  std::ostringstream os;
  os << "chi2_" << std::get<ChiSquareLaw>(law).df;
  return os.str();
}

long lrt_df(int p1, int p2) {
  if (p1 < 1 || p2 < 1) {
    throw Error(ErrorKind::InvalidArgument, "dimensions must be positive");
  }
  const long a = p1;
  const long b = p2;
  const long p = a * b;
  return p * (p + 1) / 2 - a * (a + 1) / 2 - b * (b + 1) / 2 + 1;
}

double lrt_statistic(const Matrix& sn, const Matrix& s1, const Matrix& s2, Index n) {
  const double p1 = static_cast<double>(s1.rows());
  const double p2 = static_cast<double>(s2.rows());
  // log det(s2 (x) s1) = p1 log det s2 + p2 log det s1
  const double separable = p1 * log_det_spd(s2, "column factor") +
                           p2 * log_det_spd(s1, "row factor");
  const double stat = static_cast<double>(n) * (separable - log_det_spd(sn, "S_n"));
  return std::max(stat, 0.0);
}

SeparabilityAnalysis::SeparabilityAnalysis(const MatrixSample& sample, TestConfig config)
    : sample_(sample), config_(std::move(config)) {
  for (double level : config_.levels) {
    if (!(level > 0.0 && level < 1.0)) {
      throw Error(ErrorKind::InvalidArgument, "test levels must lie in (0, 1)");
    }
  }
  if (sample.p1() == 1 || sample.p2() == 1) {
    trivial_ = true;
    return;
  }
  const Index p = Index{sample.p1()} * sample.p2();
  if (sample.n() - 1 <= p) {
    std::ostringstream os;
    os << "separability tests need n - 1 > p1 p2 = " << p << " (got n = " << sample.n()
       << ")";
    throw Error(ErrorKind::SampleTooSmall, os.str());
  }
  sn_ = separ::sample_covariance(sample);
  fit_ = flip_flop_from_covariance(sn_, sample.p1(), sample.p2(), config_.flip_flop);
  v_ = comparison_matrix(sn_, fit_).v;
}

const MomentEstimates& SeparabilityAnalysis::moments() {
  if (trivial_) {
    throw Error(ErrorKind::DegenerateDimensions, "no moment estimates for p1 = 1 or p2 = 1");
  }
  if (!moments_) moments_ = moment_estimates(standardize_sample(sample_, fit_));
  return *moments_;
}

TestReport SeparabilityAnalysis::finish(Method method, double statistic, NullLaw law,
                                        double p_value,
                                        std::vector<std::string> warnings) const {
  TestReport report;
  report.method = method;
  report.statistic = statistic;
  report.null_law = std::move(law);
  report.p_value = std::clamp(p_value, 0.0, 1.0);
  for (double level : config_.levels) report.reject_at[level] = report.p_value < level;
  report.diagnostics.warnings = std::move(warnings);
  if (!trivial_) {
    report.diagnostics.flip_flop_iterations = fit_.iterations;
    report.diagnostics.flip_flop_residual = fit_.final_residual;
  }
  if (moments_) {
    report.diagnostics.t1 = moments_->t1;
    report.diagnostics.t2 = moments_->t2;
    report.diagnostics.t2_truncated = moments_->t2_truncated;
  }
  return report;
}

TestReport SeparabilityAnalysis::trivial_report(Method method) const {
  NullLaw law = method == Method::norm ? NullLaw{MixtureSpec{}} : NullLaw{ChiSquareLaw{0}};
  return finish(method, 0.0, std::move(law), 1.0,
                {"p1 = 1 or p2 = 1: the covariance is separable by construction"});
}

TestReport SeparabilityAnalysis::norm_test() {
  if (trivial_) return trivial_report(Method::norm);
  const Index p = v_.rows();
  const double statistic =
      static_cast<double>(sample_.n()) * (v_ - Matrix::Identity(p, p)).squaredNorm();
  const MomentEstimates& m = moments();
  const NormTestDfs dfs = norm_test_dfs(sample_.p1(), sample_.p2());
  MixtureSpec law({{m.t1, dfs.d1}, {m.t2, dfs.d2}});
  std::vector<std::string> warnings;
  if (m.t2_truncated) {
    warnings.emplace_back("t2 estimate was negative and set to 0; second mixture term dropped");
  }
  const double p_value = mixture_sf(statistic, law, config_.mixture_tol);
  return finish(Method::norm, statistic, std::move(law), p_value, std::move(warnings));
}

TestReport SeparabilityAnalysis::wald_test() {
  if (trivial_) return trivial_report(Method::wald);
  const Index p = v_.rows();
  const Vector deviation = vec(v_ - Matrix::Identity(p, p));
  const auto geometry = cached_wald_geometry(sample_.p1(), sample_.p2());
  const WaldWeight weight = upsilon_hat(moments(), *geometry);
  const double quad = deviation.dot(weight.upsilon * deviation);
  const double statistic = std::max(0.0, static_cast<double>(sample_.n()) * quad);
  std::vector<std::string> warnings;
  if (!weight.used_g2) {
    warnings.emplace_back("t2 estimate was negative and set to 0; G2 part of the weight dropped");
  }
  return finish(Method::wald, statistic, ChiSquareLaw{weight.df},
                chi2_sf(statistic, static_cast<double>(weight.df)), std::move(warnings));
}

TestReport SeparabilityAnalysis::lrt_test() {
  if (trivial_) return trivial_report(Method::lrt);
  const double statistic = lrt_statistic(sn_, fit_.s1, fit_.s2, sample_.n());
  const long df = lrt_df(sample_.p1(), sample_.p2());
  return finish(Method::lrt, statistic, ChiSquareLaw{df},
                chi2_sf(statistic, static_cast<double>(df)), {});
}

TestReport SeparabilityAnalysis::run(Method method) {
  switch (method) {
    case Method::norm: return norm_test();
    case Method::wald: return wald_test();
    case Method::lrt: return lrt_test();
  }
  throw Error(ErrorKind::InvalidArgument, "unknown method");
}

TestReport norm_test(const MatrixSample& sample, const TestConfig& config) {
  return SeparabilityAnalysis(sample, config).norm_test();
}

TestReport wald_test(const MatrixSample& sample, const TestConfig& config) {
  return SeparabilityAnalysis(sample, config).wald_test();
}

TestReport lrt_test(const MatrixSample& sample, const TestConfig& config) {
  return SeparabilityAnalysis(sample, config).lrt_test();
}

}  // namespace separ
