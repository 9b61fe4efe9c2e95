#include "separ/verification.hpp"

#include "separ/error.hpp"
#include "separ/kernels.hpp"
#include "separ/moments.hpp"
#include "separ/null_distribution.hpp"
#include "separ/samplers.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace separ {
namespace {

/// Running mean and standard error of a per-draw statistic.
class MeanAccumulator {
 public:
  void add(double x) {
    ++count_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (x - mean_);
  }
  double mean() const { return mean_; }
  double standard_error() const {
    return count_ > 1 ? std::sqrt(m2_ / static_cast<double>(count_ - 1) / count_) : 0.0;
  }

 private:
  long count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Averages of the entry-moment products within one draw, over every index
/// pattern the moment allows: a1 ~ m1, a2 ~ m2 (same row), a3 ~ m3 (same
/// column), a4 ~ m4, a5 ~ m5.
struct DrawMoments {
  double a1 = 0.0, a2 = 0.0, a3 = 0.0, a4 = 0.0, a5 = 0.0;
};

DrawMoments draw_moments(const Eigen::Map<const Matrix>& z) {
  const Index p1 = z.rows();
  const Index p2 = z.cols();
  const Matrix sq = z.array().square().matrix();
  DrawMoments d;
  d.a1 = sq.array().square().mean();
  // sum over k != l of sq(j,k) sq(j,l) = (row sum)^2 - sum of squares
  const double row_pairs = sq.rowwise().sum().squaredNorm() - sq.squaredNorm();
  const double col_pairs = sq.colwise().sum().squaredNorm() - sq.squaredNorm();
  d.a2 = row_pairs / static_cast<double>(p1 * p2 * (p2 - 1));
  d.a3 = col_pairs / static_cast<double>(p2 * p1 * (p1 - 1));
  const double total = sq.sum();
  // j != j', k != k': total^2 - same-row - same-column + same-entry
  const double cross =
      total * total - sq.rowwise().sum().squaredNorm() - sq.colwise().sum().squaredNorm() +
      sq.squaredNorm();
  const double patterns = static_cast<double>(p1 * (p1 - 1) * p2 * (p2 - 1));
  d.a4 = cross / patterns;
  // sum_{j != j', k != k'} z_jk z_jk' z_j'k z_j'k' = ||Z^T Z||_F^2 minus the
  // terms with j = j' or k = k'
  const Matrix gram = z.transpose() * z;
  const double all = gram.squaredNorm();
  const double five = all - sq.colwise().sum().squaredNorm() -
                      sq.rowwise().sum().squaredNorm() + sq.squaredNorm();
  d.a5 = five / patterns;
  return d;
}

CheckResult within(std::string suite, std::string name, double estimate, double reference,
                   double tolerance) {
  const double error = std::abs(estimate - reference);
  return {std::move(suite), std::move(name), estimate, reference, error, tolerance,
          error <= tolerance};
}

CheckResult within_se(std::string suite, std::string name, const MeanAccumulator& diff,
                      double reference) {
  return within(std::move(suite), std::move(name), diff.mean() + reference, reference,
                3.0 * diff.standard_error());
}

std::string label(const std::string& base, int p1, int p2) {
  std::ostringstream os;
  os << base << " (" << p1 << "," << p2 << ")";
  return os.str();
}

constexpr std::uint64_t kHaarStream = 1;
constexpr std::uint64_t kMomentStream = 2;
constexpr std::uint64_t kFourthStream = 3;
constexpr std::uint64_t kMixtureStream = 4;

void relation_checks(std::vector<CheckResult>& out, const std::string& core_name,
                     const MatrixSample& z) {
  MeanAccumulator r1, r2, r3;
  for (Index i = 0; i < z.n(); ++i) {
    const DrawMoments d = draw_moments(z.observation(i));
    r1.add(d.a1 - 3.0 * d.a2);
    r2.add(d.a2 - d.a3);
    r3.add(2.0 * d.a5 - (d.a2 - d.a4));
  }
  const std::string where = label(core_name, z.p1(), z.p2());
  out.push_back(within_se("moments", "m1 - 3 m2, " + where, r1, 0.0));
  out.push_back(within_se("moments", "m2 - m3, " + where, r2, 0.0));
  out.push_back(within_se("moments", "2 m5 - (m2 - m4), " + where, r3, 0.0));
}

void singular_law_checks(std::vector<CheckResult>& out, const std::string& law_name,
                         const SingularLawSampler& law, const SingularLaw& law_moments,
                         int p1, int p2, Index draws, std::uint64_t seed) {
  const SphericalMoments expected = moments_from_singular_law(law_moments, p1, p2);
  const MatrixSample z = sample_spherical(draws, p1, p2, law, seed);
  MeanAccumulator m2, m4;
  for (Index i = 0; i < z.n(); ++i) {
    const DrawMoments d = draw_moments(z.observation(i));
    m2.add(d.a2 - expected.m2());
    m4.add(d.a4 - expected.m4());
  }
  const std::string where = label(law_name, p1, p2);
  out.push_back(within_se("moments", "m2 from singular values, " + where, m2, expected.m2()));
  out.push_back(within_se("moments", "m4 from singular values, " + where, m4, expected.m4()));
}

/// Largest entrywise gap between the empirical and the closed-form A,
/// accumulating the sample in chunks to bound memory.
double fourth_matrix_error(const Core& core, const SphericalMoments& moments, Index draws,
                           std::uint64_t seed) {
  constexpr int p = 2;
  constexpr Index chunk = 1'000'000;
  const Matrix expected = fourth_moment_matrix(moments, p, p);
  Matrix scatter = Matrix::Zero(expected.rows(), expected.cols());
  Index done = 0;
  for (std::uint64_t c = 0; done < draws; ++c) {
    const Index size = std::min(chunk, draws - done);
    scatter += kernels::fourth_moment_scatter(sample_core(size, p, p, core, split_seed(seed, kFourthStream, c)).vecs());
    done += size;
  }
  scatter /= static_cast<double>(draws);
  return (scatter - expected).cwiseAbs().maxCoeff();
}

}  // namespace

std::vector<CheckResult> verify_haar(std::uint64_t seed) {
  constexpr Index draws = 1'000'000;
  constexpr double tol = 0.003;
  std::vector<CheckResult> out;
  for (int p1 : {2, 3, 4}) {
    Rng rng(split_seed(seed, kHaarStream, static_cast<std::uint64_t>(p1)));
    double u4 = 0.0, u_row = 0.0, u_col = 0.0, u_diag = 0.0;
    for (Index i = 0; i < draws; ++i) {
      const Matrix u = sample_haar_frame(p1, 2, rng);
      const double a = u(0, 0) * u(0, 0);
      u4 += a * a;
      u_row += a * u(0, 1) * u(0, 1);
      u_col += a * u(1, 0) * u(1, 0);
      u_diag += a * u(1, 1) * u(1, 1);
    }
    const HaarMoments h = haar_moments(p1);
    const double n = static_cast<double>(draws);
    const std::string p = " p1=" + std::to_string(p1);
    out.push_back(within("haar", "E u11^4" + p, u4 / n, h.u11_4, tol));
    out.push_back(within("haar", "E u11^2 u12^2" + p, u_row / n, h.u11_2_u12_2, tol));
    out.push_back(within("haar", "E u11^2 u21^2" + p, u_col / n, h.u11_2_u21_2, tol));
    out.push_back(within("haar", "E u11^2 u22^2" + p, u_diag / n, h.u11_2_u22_2, tol));
  }
  return out;
}

std::vector<CheckResult> verify_moments(std::uint64_t seed) {
  constexpr Index draws = 1'000'000;
  std::vector<CheckResult> out;

  relation_checks(out, "gaussian", sample_matrix_normal(draws, 3, 2, split_seed(seed, kMomentStream, 0)));
  relation_checks(out, "matrix-t nu=7",
                  sample_matrix_t(draws, 3, 2, 7.0, split_seed(seed, kMomentStream, 1)));

  {
    const MatrixSample z = sample_matrix_normal(draws, 2, 2, split_seed(seed, kMomentStream, 2));
    const kernels::FrobeniusSums sums = kernels::frobenius_sums(z.vecs());
    const double scale = 4.0 * static_cast<double>(draws);
    const FrobeniusMoments expected =
        frobenius_moment_identities(SphericalMoments::from_free(1.0, 1.0, 1.0), 2, 2);
    auto relative = [](std::string name, double estimate, double reference) {
      CheckResult r = within("moments", std::move(name), estimate, reference, 0.01 * reference);
      return r;
    };
    out.push_back(relative("E||Z||^2/(p1 p2) gaussian (2,2)", sums.sum_sq / scale, expected.second));
    out.push_back(relative("E||Z||^4/(p1 p2) gaussian (2,2)", sums.sum_sq_sq / scale, expected.fourth));
    out.push_back(relative("mean E z_jk^4 gaussian (2,2)", sums.sum_fourth / scale, expected.entry_fourth));
  }

  {
    Vector lambda(2);
    lambda << 1.3, 0.7;
    const SingularLaw fixed{0.5 * (std::pow(1.3, 4) + std::pow(0.7, 4)), 1.3 * 1.3 * 0.7 * 0.7,
                            0.5 * (1.3 * 1.3 + 0.7 * 0.7)};
    singular_law_checks(out, "fixed lambda=(1.3,0.7)", constant_singular_law(lambda), fixed, 3,
                        2, draws, split_seed(seed, kMomentStream, 3));

    // i.i.d. uniform(0.5, 1.5) singular values
    const SingularLawSampler uniform = [](Rng& rng, int q) -> Vector {
      std::uniform_real_distribution<double> u(0.5, 1.5);
      Vector v(q);
      for (int k = 0; k < q; ++k) v(k) = u(rng);
      return v;
    };
    const double e2 = (std::pow(1.5, 3) - std::pow(0.5, 3)) / 3.0;
    const double e4 = (std::pow(1.5, 5) - std::pow(0.5, 5)) / 5.0;
    singular_law_checks(out, "iid uniform(0.5,1.5)", uniform, SingularLaw{e4, e2 * e2, e2}, 3,
                        2, draws, split_seed(seed, kMomentStream, 4));
  }
  return out;
}

std::vector<CheckResult> verify_fourth_moment_matrix(std::uint64_t seed) {
  std::vector<CheckResult> out;
  const double gaussian_error = fourth_matrix_error(
      GaussianCore{}, SphericalMoments::from_free(1.0, 1.0, 1.0), 10'000'000,
      split_seed(seed, kFourthStream, 0));
  out.push_back({"fourth-moment-matrix", "gaussian core (2,2), 1e7 draws", gaussian_error, 0.0,
                 gaussian_error, 0.01, gaussian_error <= 0.01});

  Vector lambda(2);
  lambda << 1.3, 0.7;
  const SingularLaw fixed{0.5 * (std::pow(1.3, 4) + std::pow(0.7, 4)), 1.3 * 1.3 * 0.7 * 0.7,
                          0.5 * (1.3 * 1.3 + 0.7 * 0.7)};
  const double haar_error =
      fourth_matrix_error(SphericalCore{constant_singular_law(lambda)},
                          moments_from_singular_law(fixed, 2, 2), 1'000'000,
                          split_seed(seed, kFourthStream, 1));
  out.push_back({"fourth-moment-matrix", "fixed lambda=(1.3,0.7) Haar core (2,2), 1e6 draws",
                 haar_error, 0.0, haar_error, 0.01, haar_error <= 0.01});
  return out;
}

std::vector<CheckResult> verify_mixture_cdf(std::uint64_t seed) {
  std::vector<CheckResult> out;
  {
    constexpr Index draws = 10'000'000;
    const MixtureSpec spec({{1.5, 25}, {2.5, 9}});
    const std::vector<double> points{30, 40, 50, 60, 70, 80, 90, 100, 120};
    std::vector<Index> exceed(points.size(), 0);
    Rng rng(split_seed(seed, kMixtureStream, 0));
    std::chi_squared_distribution<double> c25(25.0), c9(9.0);
    for (Index i = 0; i < draws; ++i) {
      const double x = 1.5 * c25(rng) + 2.5 * c9(rng);
      for (std::size_t k = 0; k < points.size(); ++k) exceed[k] += x > points[k];
    }
    for (std::size_t k = 0; k < points.size(); ++k) {
      std::ostringstream name;
      name << "P(1.5 chi2_25 + 2.5 chi2_9 > " << points[k] << ") vs 1e7 draws";
      out.push_back(within("mixture-cdf", name.str(), mixture_sf(points[k], spec),
                           static_cast<double>(exceed[k]) / draws, 0.001));
    }
  }
  {
    const boost::math::chi_squared_distribution<double> pooled(34.0);
    const MixtureSpec spec({{2.0, 25}, {2.0, 9}});
    double worst = 0.0;
    for (double prob : {1e-6, 1e-4, 1e-2, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99, 1 - 1e-4, 1 - 1e-6}) {
      const double q = boost::math::quantile(boost::math::complement(pooled, prob));
      worst = std::max(worst, std::abs(mixture_sf(2.0 * q, spec) - prob));
    }
    out.push_back({"mixture-cdf", "2 chi2_25 + 2 chi2_9 vs 2 chi2_34, tail 1e-6..1-1e-6", worst,
                   0.0, worst, 1e-8, worst <= 1e-8});
  }
  return out;
}

std::vector<CheckResult> run_verification(std::string_view suite, std::uint64_t seed) {
  if (suite == "haar") return verify_haar(seed);
  if (suite == "moments") return verify_moments(seed);
  if (suite == "fourth-moment-matrix") return verify_fourth_moment_matrix(seed);
  if (suite == "mixture-cdf") return verify_mixture_cdf(seed);
  if (suite == "all") {
    std::vector<CheckResult> out;
    for (auto part : {verify_haar(seed), verify_moments(seed), verify_fourth_moment_matrix(seed),
                      verify_mixture_cdf(seed)}) {
      out.insert(out.end(), part.begin(), part.end());
    }
    return out;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown verification suite '" + std::string(suite) + "'");
}

}  // namespace separ
