#include "separ/error.hpp"
#include "separ/moments.hpp"
#include "separ/samplers.hpp"

#include <doctest.h>

#include <array>
#include <cmath>

using namespace separ;

namespace {

double max_abs(const Matrix& a) { return a.cwiseAbs().maxCoeff(); }

// E z_e1 z_e2 z_e3 z_e4 for spherical Z, read off from the index pattern:
// every row and column index has to appear an even number of times.
double spherical_product_moment(const SphericalMoments& m, std::array<std::pair<int, int>, 4> e) {
  std::sort(e.begin(), e.end());
  if (e[0] == e[3]) return m.m1();
  if (e[0] == e[1] && e[2] == e[3]) {
    if (e[0].first == e[2].first) return m.m2();
    if (e[0].second == e[2].second) return m.m3();
    return m.m4();
  }
  // rectangle (j,k) (j,k') (j',k) (j',k') after sorting
  if (e[0].first == e[1].first && e[2].first == e[3].first && e[0].first != e[2].first &&
      e[0].second == e[2].second && e[1].second == e[3].second && e[0].second != e[1].second) {
    return m.m5();
  }
  return 0.0;
}

Matrix oracle_fourth_moment_matrix(const SphericalMoments& m, int p1, int p2) {
  const int p = p1 * p2;
  auto entry = [p1](int k) { return std::pair{k % p1, k / p1}; };
  Matrix a(p * p, p * p);
  for (int r = 0; r < p * p; ++r)
    for (int c = 0; c < p * p; ++c)
      a(r, c) = spherical_product_moment(
          m, {entry(r / p), entry(r % p), entry(c / p), entry(c % p)});
  return a;
}

}  // namespace

TEST_CASE("Haar frame moments") {
  const HaarMoments h = haar_moments(3);
  CHECK(h.u11_4 == doctest::Approx(3.0 / 15.0));
  CHECK(h.u11_2_u12_2 == doctest::Approx(1.0 / 15.0));
  CHECK(h.u11_2_u21_2 == doctest::Approx(1.0 / 15.0));
  CHECK(h.u11_2_u22_2 == doctest::Approx(4.0 / 30.0));
  // rows of an orthogonal matrix have unit norm: p E u11^4 + p(p-1) E u11^2 u12^2 = 1
  for (int p : {2, 3, 4, 7}) {
    const HaarMoments g = haar_moments(p);
    CHECK(p * g.u11_4 + p * (p - 1) * g.u11_2_u12_2 == doctest::Approx(1.0));
  }
  CHECK_THROWS_AS(haar_moments(1), Error);
}

TEST_CASE("spherical moments derive the dependent entries") {
  const SphericalMoments m = SphericalMoments::from_free(1.0, 0.4, 0.3);
  CHECK(m.m1() == doctest::Approx(1.2));
  CHECK(m.m3() == doctest::Approx(0.4));
  CHECK(m.m5() == doctest::Approx(0.05));
  CHECK_THROWS_AS(SphericalMoments::from_free(0.0, 1.0, 1.0), Error);
  CHECK_THROWS_AS(SphericalMoments::from_free(1.0, 1.0, 0.2), Error);
  CHECK_THROWS_AS(SphericalMoments::from_free(1.0, -1.0, 0.5), Error);
}

TEST_CASE("singular-value formulas") {
  SUBCASE("unit singular values at (3,2)") {
    // Z = U V^T; entries follow from the Haar moments of U.
    const SphericalMoments m = moments_from_singular_law({1.0, 1.0, 1.0}, 3, 2);
    CHECK(m.m4() == doctest::Approx(16.0 / 120.0));
    CHECK(m.m2() == doctest::Approx(8.0 / 120.0));
    CHECK(m.beta() == doctest::Approx(1.0 / 3.0));
    CHECK(3 * m.m4() - m.m2() == doctest::Approx(2.0 / (3 * 2)));
  }
  SUBCASE("Gaussian singular values reproduce the matrix normal") {
    // lambda^2 are the eigenvalues of a Wishart_2(I, 3) matrix W:
    // E tr W^2 = 2*3*6 and E (tr W)^2 = 6*8.
    const double e_l4 = 36.0 / 2.0;
    const double e_l2l2 = (48.0 - 36.0) / 2.0;
    const SphericalMoments m = moments_from_singular_law({e_l4, e_l2l2, 3.0}, 3, 2);
    CHECK(m.m2() == doctest::Approx(1.0));
    CHECK(m.m4() == doctest::Approx(1.0));
    CHECK(m.beta() == doctest::Approx(1.0));
    const SphericalMoments swapped = moments_from_singular_law({e_l4, e_l2l2, 3.0}, 2, 3);
    CHECK(swapped.m4() == doctest::Approx(m.m4()));
  }
  SUBCASE("second weight is 2 E(l1^2 l2^2) / (p1 (p1 - 1))") {
    for (auto [p1, p2] : {std::pair{4, 2}, std::pair{5, 3}, std::pair{3, 3}}) {
      const SingularLaw law{2.7, 1.1, 1.4};
      const SphericalMoments m = moments_from_singular_law(law, p1, p2);
      CHECK(3 * m.m4() - m.m2() == doctest::Approx(2.0 * law.e_l2l2 / (p1 * (p1 - 1.0))));
    }
  }
}

TEST_CASE("fourth-moment matrix matches the index-pattern oracle") {
  const SphericalMoments gaussian = SphericalMoments::from_free(1.0, 1.0, 1.0);
  const SphericalMoments other = SphericalMoments::from_free(0.7, 0.45, 0.2);
  for (auto [p1, p2] : {std::pair{2, 2}, std::pair{3, 2}, std::pair{2, 3}}) {
    CAPTURE(p1);
    CAPTURE(p2);
    CHECK(max_abs(fourth_moment_matrix(gaussian, p1, p2) -
                  oracle_fourth_moment_matrix(gaussian, p1, p2)) < 1e-14);
    CHECK(max_abs(fourth_moment_matrix(other, p1, p2) -
                  oracle_fourth_moment_matrix(other, p1, p2)) < 1e-14);
  }
}

TEST_CASE("Frobenius moment identities") {
  const FrobeniusMoments g =
      frobenius_moment_identities(SphericalMoments::from_free(1.0, 1.0, 1.0), 2, 2);
  CHECK(g.second == 1.0);
  CHECK(g.fourth == doctest::Approx(6.0));
  CHECK(g.entry_fourth == doctest::Approx(3.0));
  // E||Z||^4 for Gaussian Z is E chi2_{p}^2 = p (p + 2)
  const FrobeniusMoments h =
      frobenius_moment_identities(SphericalMoments::from_free(1.0, 1.0, 1.0), 3, 5);
  CHECK(h.fourth * 15 == doctest::Approx(15.0 * 17.0));
}

TEST_CASE("moment estimators on Gaussian data") {
  const MatrixSample z = sample_matrix_normal(50'000, 3, 3, 17);
  SeparableFit identity;
  identity.s1 = Matrix::Identity(3, 3);
  identity.s2 = Matrix::Identity(3, 3);
  const MatrixSample y = standardize_sample(z, identity);
  const MomentEstimates est = moment_estimates(y);
  CHECK(est.d1 == doctest::Approx(1.0).epsilon(0.02));
  CHECK(est.d2 == doctest::Approx(11.0).epsilon(0.03));
  CHECK(est.d3 == doctest::Approx(3.0).epsilon(0.03));
  CHECK(est.t1 == doctest::Approx(2.0).epsilon(0.05));
  CHECK(est.t2 == doctest::Approx(2.0).epsilon(0.1));
  CHECK_FALSE(est.t2_truncated);
}

TEST_CASE("standardization whitens and centers") {
  ModelSpec spec = ModelSpec::standard(2, 3);
  spec.sigma1 << 2.0, 0.5, 0.5, 1.0;
  spec.sigma2 << 1.0, 0.2, 0.0, 0.2, 3.0, 0.1, 0.0, 0.1, 0.5;
  spec.m = Matrix::Constant(2, 3, -1.0);
  const MatrixSample x = sample_model(200, spec, 9);
  SeparableFit fit;
  fit.s1 = spec.sigma1;
  fit.s2 = spec.sigma2;
  const MatrixSample y = standardize_sample(x, fit);
  Matrix mean = Matrix::Zero(2, 3);
  for (Index i = 0; i < x.n(); ++i) mean += x.observation(i);
  mean /= static_cast<double>(x.n());
  const Matrix a = sym_inv_sqrt(spec.sigma1);
  const Matrix b = sym_inv_sqrt(spec.sigma2);
  CHECK(max_abs(Matrix(y.observation(7)) - a * (x.observation(7) - mean) * b) < 1e-12);
}

TEST_CASE("moment estimator errors") {
  const MatrixSample z = sample_matrix_normal(100, 1, 3, 1);
  CHECK_THROWS_AS(moment_estimates(z), Error);
  const MatrixSample zero(2, 2, Matrix::Zero(4, 10));
  try {
    moment_estimates(zero);
    FAIL("expected InvalidMoments");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidMoments);
  }
}
