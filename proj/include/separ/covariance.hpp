#pragma once

// Unstructured and Kronecker-structured covariance estimates of a sample of
// p1 x p2 matrices, plus the comparison matrix V_n that whitens one by the
// other.

#include "separ/kron.hpp"

#include <vector>

namespace separ {

/// n observations of p1 x p2 matrices, stored as a (p1 p2) x n matrix whose
/// i-th column is vec(X_i). Immutable once built.
class MatrixSample {
 public:
  MatrixSample(int p1, int p2, Matrix vecs);

  static MatrixSample from_matrices(const std::vector<Matrix>& observations);

  int p1() const noexcept { return p1_; }
  int p2() const noexcept { return p2_; }
  Index n() const noexcept { return vecs_.cols(); }

  const Matrix& vecs() const noexcept { return vecs_; }

  /// X_i as a p1 x p2 view into the storage.
  Eigen::Map<const Matrix> observation(Index i) const;

  /// The same data with every observation transposed (p2 x p1).
  MatrixSample transposed() const;

 private:
  int p1_;
  int p2_;
  Matrix vecs_;
};

enum class Normalization { unit_det_s1 };

struct FlipFlopOptions {
  double tol = 1e-10;
  int max_iter = 1000;
};

/// Solution of the matrix-normal likelihood equations. Under unit_det_s1 the
/// row factor has determinant one and the column factor carries the scale,
/// so s2 (x) s1 is the matrix-normal MLE of the full covariance.
struct SeparableFit {
  Matrix s1;
  Matrix s2;
  int iterations = 0;
  double final_residual = 0.0;
  Normalization normalization = Normalization::unit_det_s1;
  /// Fixed-point residual after every iteration.
  std::vector<double> residual_history;
};

/// S_n = (1/n) sum vec(X_i - Xbar) vec(X_i - Xbar)^T. Divisor n.
Matrix sample_covariance(const MatrixSample& sample);

/// Flip-flop fixed point of the two matrix-normal likelihood equations,
/// started from s2 = I. Throws SingularIterate when an iterate loses positive
/// definiteness and NoConvergence when max_iter is exhausted.
SeparableFit flip_flop_mle(const MatrixSample& sample, const FlipFlopOptions& options = {});

/// Same iteration driven by a precomputed S_n. Both likelihood equations only
/// involve the data through S_n, whose p1 x p1 blocks (k, l) are the averaged
/// products of columns k and l of the centered observations.
SeparableFit flip_flop_from_covariance(const Matrix& sn, int p1, int p2,
                                       const FlipFlopOptions& options = {});

/// a / det(a)^{1/p}. Throws NotPositiveDefinite.
Matrix det_normalize(const Matrix& a);

struct ComparisonMatrix {
  Matrix v;
};

/// V_n = N(S_n)^{-1/2} (N(s2) (x) N(s1)) N(S_n)^{-1/2}, N = det_normalize.
ComparisonMatrix comparison_matrix(const Matrix& sn, const SeparableFit& fit);

}  // namespace separ
