#pragma once

// Fourth moments of matrix-spherical cores: sample estimators of the null-law
// weights and the closed-form relations between entry moments, singular-value
// moments and the full fourth-moment matrix.

#include "separ/covariance.hpp"

namespace separ {

/// Averages of the standardized sample and the two weight estimators derived
/// from them. t1 estimates (m4 + m2) / beta^2 and t2 estimates
/// (3 m4 - m2) / beta^2; a negative raw t2 is reported as 0 with the flag set.
struct MomentEstimates {
  double d1 = 0.0;
  double d2 = 0.0;
  double d3 = 0.0;
  double t1 = 0.0;
  double t2 = 0.0;
  bool t2_truncated = false;
  double t2_raw = 0.0;
};

/// Y_i = s1^{-1/2} (X_i - Xbar) s2^{-1/2}.
MatrixSample standardize_sample(const MatrixSample& sample, const SeparableFit& fit);

/// Throws DegenerateDimensions when p1 = 1 or p2 = 1 and InvalidMoments when
/// t1 <= 1e-12.
MomentEstimates moment_estimates(const MatrixSample& standardized);

/// Moments of the singular values lambda_1..lambda_q (q = min(p1, p2)) of Z.
struct SingularLaw {
  double e_l4 = 0.0;    // E lambda_1^4
  double e_l2l2 = 0.0;  // E lambda_1^2 lambda_2^2
  double e_l2 = 0.0;    // E lambda_1^2
};

/// Entry moments of a matrix-spherical Z:
///   m1 = E z11^4, m2 = E z11^2 z12^2, m3 = E z11^2 z21^2,
///   m4 = E z11^2 z22^2, m5 = E z11 z12 z21 z22, beta = E z11^2.
/// Sphericity leaves two free fourth moments; the rest follow from
/// m1 = 3 m2, m3 = m2 and 2 m5 = m2 - m4.
class SphericalMoments {
 public:
  /// Throws InvalidMoments unless beta > 0, m4 + m2 > 0 and 3 m4 - m2 >= 0.
  static SphericalMoments from_free(double beta, double m2, double m4);

  double beta() const noexcept { return beta_; }
  double m1() const noexcept { return 3.0 * m2_; }
  double m2() const noexcept { return m2_; }
  double m3() const noexcept { return m2_; }
  double m4() const noexcept { return m4_; }
  double m5() const noexcept { return 0.5 * (m2_ - m4_); }

 private:
  SphericalMoments(double beta, double m2, double m4) : beta_(beta), m2_(m2), m4_(m4) {}

  double beta_;
  double m2_;
  double m4_;
};

/// Entry moments of Z = U Lambda V^T from the singular-value law. Inputs with
/// p1 < p2 are handled by swapping the roles of rows and columns, which
/// leaves every entry moment unchanged. Requires max(p1, p2) >= 2.
SphericalMoments moments_from_singular_law(const SingularLaw& law, int p1, int p2);

/// Fourth moments of the entries of a Haar-distributed frame U (p1 rows).
struct HaarMoments {
  double u11_4;        // E u11^4
  double u11_2_u12_2;  // E u11^2 u12^2
  double u11_2_u21_2;  // E u11^2 u21^2
  double u11_2_u22_2;  // E u11^2 u22^2
};

HaarMoments haar_moments(int p1);

/// A = E[(vec Z (x) vec Z)(vec Z (x) vec Z)^T], side p1^2 p2^2.
Matrix fourth_moment_matrix(const SphericalMoments& moments, int p1, int p2);

/// Theoretical values of E||Z||^2/(p1 p2), E||Z||^4/(p1 p2) and the average
/// fourth entry moment.
struct FrobeniusMoments {
  double second;
  double fourth;
  double entry_fourth;
};

FrobeniusMoments frobenius_moment_identities(const SphericalMoments& moments, int p1, int p2);

}  // namespace separ
