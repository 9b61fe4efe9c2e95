#pragma once

// Data-parallel passes over a sample stored as a (p1 p2) x n matrix whose
// columns are vec(X_i).
//
// Two implementations are kept side by side:
//   separ::kernels::reference  plain serial loops, one observation at a time;
//                              the baseline the tests compare against.
//   separ::kernels             OpenMP versions. The observation range is cut
//                              into a partition that depends only on n, each
//                              block is reduced independently, and block
//                              partials are summed in block order. Results are
//                              therefore bit-identical for any thread count,
//                              including inside an enclosing parallel region.

#include "separ/kron.hpp"

namespace separ::kernels {

/// Sums over standardized observations Y_i used by the moment estimators.
struct FrobeniusSums {
  double sum_sq = 0.0;      // sum_i ||Y_i||_F^2
  double sum_sq_sq = 0.0;   // sum_i ||Y_i||_F^4
  double sum_fourth = 0.0;  // sum_i sum_jk y_{i,jk}^4

  FrobeniusSums& operator+=(const FrobeniusSums& other) {
    sum_sq += other.sum_sq;
    sum_sq_sq += other.sum_sq_sq;
    sum_fourth += other.sum_fourth;
    return *this;
  }
};

Vector column_mean(const Matrix& vecs);

/// sum_i (x_i - mean)(x_i - mean)^T, exactly symmetric.
Matrix centered_scatter(const Matrix& vecs, const Vector& mean);

FrobeniusSums frobenius_sums(const Matrix& vecs);

/// sum_i (z_i (x) z_i)(z_i (x) z_i)^T with z_i the i-th column.
Matrix fourth_moment_scatter(const Matrix& vecs);

/// Returns `transform * (vecs - mean 1^T)`; with transform = B^T (x) A this
/// maps every X_i to A (X_i - mean) B.
Matrix centered_transform(const Matrix& vecs, const Vector& mean,
                          const Matrix& transform);

namespace reference {

Vector column_mean(const Matrix& vecs);
Matrix centered_scatter(const Matrix& vecs, const Vector& mean);
FrobeniusSums frobenius_sums(const Matrix& vecs);
Matrix fourth_moment_scatter(const Matrix& vecs);
Matrix centered_transform(const Matrix& vecs, const Vector& mean,
                          const Matrix& transform);

}  // namespace reference

/// Number of reduction blocks used for n observations (thread-count free).
Index block_count(Index n);

}  // namespace separ::kernels
