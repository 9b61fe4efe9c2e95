#pragma once

// Kronecker-algebra constructions: vec, Kronecker products, commutation
// matrices and the structural matrices that describe the asymptotic
// covariance of the separability statistics.
//
// Every structural matrix is dense and built from exact 0/+-rational entries.
// Storage is column-major (Eigen's default), so vec(A) is just the storage
// order of A.

#include <Eigen/Dense>

#include <memory>

namespace separ {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Column-stacked entries of `a`.
Vector vec(const Matrix& a);

/// Inverse of vec for a rows x cols shape.
Matrix unvec(const Vector& v, Index rows, Index cols);

Matrix kron(const Matrix& a, const Matrix& b);

/// The mn x mn permutation K_{m,n} with K_{m,n} vec(A) = vec(A^T) for every
/// m x n matrix A.
Matrix commutation_matrix(int m, int n);

/// P_p = vec(I_p) vec(I_p)^T / p and its complement Q_p = I - P_p.
struct CenteringProjectors {
  Matrix p;
  Matrix q;
};

CenteringProjectors centering_projectors(int p);

/// Building blocks of the fourth-moment matrix of a matrix-spherical Z, all of
/// side p1^2 p2^2. l1 = j1 / p1 and l2 = j2 / p2 are orthogonal projections,
/// k1 and k2 are commuting involutions.
struct KronBlocks {
  Matrix j1;
  Matrix j2;
  Matrix k1;
  Matrix k2;
  Matrix l1;
  Matrix l2;
};

KronBlocks building_blocks(int p1, int p2);

/// Coefficient matrices mapping the vectorized second-moment fluctuation onto
/// the fluctuations of the determinant-normalized row (r1, p1^2 x p1^2 p2^2)
/// and column (r2, p2^2 x p1^2 p2^2) covariance estimates.
struct RMatrices {
  Matrix r1;
  Matrix r2;
};

RMatrices r_matrices(int p1, int p2);

/// Data-independent matrices of the Wald statistic. proj1 = b0 g1 b0^T and
/// proj2 = b0 g2 b0^T are mutually orthogonal projections whose ranks are the
/// two chi-square degrees of freedom of the squared-norm statistic.
struct WaldGeometry {
  int p1 = 0;
  int p2 = 0;
  Matrix b0;
  Matrix g1;
  Matrix g2;
  Matrix proj1;
  Matrix proj2;
};

WaldGeometry wald_geometry(int p1, int p2);

/// Process-wide cache of wald_geometry; safe for concurrent readers and
/// inserters. Entries are never evicted.
std::shared_ptr<const WaldGeometry> cached_wald_geometry(int p1, int p2);

/// Symmetric positive definite square root and inverse square root via the
/// spectral decomposition. Throws NotPositiveDefinite when any eigenvalue is
/// at or below dim * epsilon * largest eigenvalue.
Matrix sym_sqrt(const Matrix& a);
Matrix sym_inv_sqrt(const Matrix& a);

}  // namespace separ
