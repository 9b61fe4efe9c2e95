#pragma once

// Null laws of the separability statistics: degrees of freedom, chi-square
// tails, weighted chi-square mixtures and the Wald weighting matrix.

#include "separ/kron.hpp"
#include "separ/moments.hpp"

#include <string>
#include <vector>

namespace separ {

struct ChiSquareTerm {
  double weight;
  long df;
};

/// Law of sum_j weight_j * chi2_{df_j} with independent terms. Terms with
/// weight 0 or df 0 are dropped on construction; an empty mixture is the
/// point mass at zero.
class MixtureSpec {
 public:
  MixtureSpec() = default;
  explicit MixtureSpec(std::vector<ChiSquareTerm> terms);

  const std::vector<ChiSquareTerm>& terms() const noexcept { return terms_; }
  bool empty() const noexcept { return terms_.empty(); }
  std::string describe() const;

 private:
  std::vector<ChiSquareTerm> terms_;
};

struct NormTestDfs {
  long d1;
  long d2;
};

/// d1 = (p1+2)(p1-1)(p2+2)(p2-1)/4, d2 = p1 p2 (p1-1)(p2-1)/4.
NormTestDfs norm_test_dfs(int p1, int p2);

/// (p1^2-1)(p2^2-1)/2 + (p1-1)(p2-1)/2, the rank of the asymptotic
/// covariance of sqrt(n) vec(V_n - I).
long wald_df(int p1, int p2);

/// P(chi2_df > x); 1 for x <= 0.
double chi2_sf(double x, double df);

/// P(sum_j a_j chi2_{d_j} > t) by numerical inversion of the characteristic
/// function (Imhof's integral). The absolute error, quadrature plus tail
/// truncation, stays below `tol`; otherwise QuadratureFailure is thrown. The
/// result is clamped to [0, 1].
double mixture_sf(double t, const MixtureSpec& spec, double tol = 1e-8);

struct WaldWeight {
  Matrix upsilon;
  long df = 0;
  bool used_g2 = true;
};

/// Upsilon = proj1 / t1 + proj2 / t2, the estimated Moore-Penrose inverse of
/// the asymptotic covariance of sqrt(n) vec(V_n - I). The second term is
/// dropped when t2 was truncated to zero. Throws InvalidMoments if t1 <= 0.
WaldWeight upsilon_hat(const MomentEstimates& estimates, const WaldGeometry& geometry);

}  // namespace separ
