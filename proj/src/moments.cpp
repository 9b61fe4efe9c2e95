#include "separ/moments.hpp"

#include "separ/error.hpp"
#include "separ/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace separ {

MatrixSample standardize_sample(const MatrixSample& sample, const SeparableFit& fit) {
  if (fit.s1.rows() != sample.p1() || fit.s2.rows() != sample.p2()) {
    throw Error(ErrorKind::DimensionMismatch, "fit does not match the sample dimensions");
  }
  // vec(A X B) = (B^T (x) A) vec(X) with symmetric A, B.
  const Matrix transform = kron(sym_inv_sqrt(fit.s2), sym_inv_sqrt(fit.s1));
  const Vector mean = kernels::column_mean(sample.vecs());
  return MatrixSample(sample.p1(), sample.p2(),
                      kernels::centered_transform(sample.vecs(), mean, transform));
}

MomentEstimates moment_estimates(const MatrixSample& standardized) {
  const double p1 = standardized.p1();
  const double p2 = standardized.p2();
  if (standardized.p1() < 2 || standardized.p2() < 2) {
    throw Error(ErrorKind::DegenerateDimensions,
                "moment estimators need p1 >= 2 and p2 >= 2");
  }
  if (standardized.n() < 2) {
    throw Error(ErrorKind::SampleTooSmall, "moment estimators need n >= 2");
  }
  const kernels::FrobeniusSums sums = kernels::frobenius_sums(standardized.vecs());
  const double denom = p1 * p2 * static_cast<double>(standardized.n());

  MomentEstimates est;
  est.d1 = sums.sum_sq / denom;
  est.d2 = sums.sum_sq_sq / denom;
  est.d3 = sums.sum_fourth / denom;
  if (!(est.d1 > 0.0)) {
    throw Error(ErrorKind::InvalidMoments, "standardized sample has zero spread");
  }

  const double scale = (p1 - 1.0) * (p2 - 1.0) * est.d1 * est.d1;
  est.t1 = (est.d2 + (p1 * p2 - 2.0 * p1 - 2.0 * p2) * est.d3 / 3.0) / scale;
  est.t2_raw = (3.0 * est.d2 - (p1 + 2.0) * (p2 + 2.0) * est.d3 / 3.0) / scale;
  est.t2_truncated = est.t2_raw < 0.0;
  est.t2 = est.t2_truncated ? 0.0 : est.t2_raw;
  if (!(est.t1 > 1e-12)) {
    throw Error(ErrorKind::InvalidMoments,
                "estimated t1 = " + std::to_string(est.t1) +
                    " is not positive; fourth moments are degenerate");
  }
  return est;
}

SphericalMoments SphericalMoments::from_free(double beta, double m2, double m4) {
  if (!std::isfinite(beta) || !std::isfinite(m2) || !std::isfinite(m4) || beta <= 0.0) {
    throw Error(ErrorKind::InvalidMoments, "moments must be finite with beta > 0");
  }
  if (!(m4 + m2 > 0.0)) {
    throw Error(ErrorKind::InvalidMoments, "m4 + m2 must be positive");
  }
  if (3.0 * m4 - m2 < -1e-12 * std::abs(m2)) {
    throw Error(ErrorKind::InvalidMoments, "3 m4 - m2 must be nonnegative");
  }
  return SphericalMoments(beta, m2, m4);
}

SphericalMoments moments_from_singular_law(const SingularLaw& law, int p1, int p2) {
  // Rows are the longer side; transposing Z leaves every entry moment alone.
  const double rows = std::max(p1, p2);
  const double cols = std::min(p1, p2);
  if (cols < 1 || rows < 2) {
    throw Error(ErrorKind::DegenerateDimensions, "singular-value law needs max(p1, p2) >= 2");
  }
  const double c = rows * (rows + 2.0) * cols * (cols + 2.0);
  const double m4 = cols * law.e_l4 / c +
                    cols / (rows - 1.0) * ((rows + 1.0) * (cols + 1.0) + 2.0) * law.e_l2l2 / c;
  const double m2 = m4 + 2.0 * cols * law.e_l4 / c -
                    2.0 * cols * (1.0 + (cols + 2.0) / (rows - 1.0)) * law.e_l2l2 / c;
  const double beta = cols * law.e_l2 / (rows * cols);
  return SphericalMoments::from_free(beta, m2, m4);
}

HaarMoments haar_moments(int p1) {
  if (p1 < 2) {
    throw Error(ErrorKind::InvalidArgument, "Haar moments need p1 >= 2");
  }
  const double p = p1;
  const double base = 1.0 / (p * (p + 2.0));
  return {3.0 * base, base, base, base * (p + 1.0) / (p - 1.0)};
}

Matrix fourth_moment_matrix(const SphericalMoments& moments, int p1, int p2) {
  const KronBlocks b = building_blocks(p1, p2);
  const Index side = b.j1.rows();
  Matrix a = 0.5 * (moments.m2() - moments.m4()) *
             (b.j1 * b.k2 + b.j2 * b.k1 + b.j1 + b.j2 + b.k1 + b.k2);
  a += moments.m4() * (Matrix::Identity(side, side) + b.j1 * b.j2 + b.k1 * b.k2);
  return 0.5 * (a + a.transpose());
}

FrobeniusMoments frobenius_moment_identities(const SphericalMoments& moments, int p1, int p2) {
  return {moments.beta(),
          moments.m2() * (p1 + p2 + 1.0) + moments.m4() * (p1 - 1.0) * (p2 - 1.0),
          3.0 * moments.m2()};
}

}  // namespace separ
