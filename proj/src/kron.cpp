#include "separ/kron.hpp"

#include "separ/error.hpp"

#include <limits>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <utility>

namespace separ {
namespace {

void require_positive(int value, const char* name) {
  if (value < 1) {
    throw Error(ErrorKind::InvalidArgument,
                std::string(name) + " must be a positive integer");
  }
}

Matrix identity(Index n) { return Matrix::Identity(n, n); }

// e_i e_j^T in R^{p x p}
Matrix unit_outer(Index p, Index i, Index j) {
  Matrix e = Matrix::Zero(p, p);
  e(i, j) = 1.0;
  return e;
}

Matrix kron4(const Matrix& a, const Matrix& b, const Matrix& c,
             const Matrix& d) {
  return kron(kron(kron(a, b), c), d);
}

// Eigen-decomposition shared by the two square-root flavours.
Eigen::SelfAdjointEigenSolver<Matrix> checked_spectrum(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw Error(ErrorKind::InvalidArgument, "expected a non-empty square matrix");
  }
  if (!a.allFinite()) {
    throw Error(ErrorKind::InvalidArgument, "matrix has non-finite entries");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(a);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorKind::NotPositiveDefinite, "eigendecomposition failed");
  }
  const double largest = eig.eigenvalues().maxCoeff();
  const double tol = static_cast<double>(a.rows()) *
                     std::numeric_limits<double>::epsilon() *
                     std::max(largest, 0.0);
  if (largest <= 0.0 || eig.eigenvalues().minCoeff() <= tol) {
    throw Error(ErrorKind::NotPositiveDefinite,
                "matrix is not positive definite (smallest eigenvalue " +
                    std::to_string(eig.eigenvalues().minCoeff()) +
                    "); the covariance is rank deficient, typically because n "
                    "is too small");
  }
  return eig;
}

}  // namespace

Vector vec(const Matrix& a) {
  return Eigen::Map<const Vector>(a.data(), a.size());
}

Matrix unvec(const Vector& v, Index rows, Index cols) {
  if (rows * cols != v.size()) {
    throw Error(ErrorKind::DimensionMismatch, "unvec: size does not match shape");
  }
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = 0; i < a.rows(); ++i) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Matrix commutation_matrix(int m, int n) {
  require_positive(m, "m");
  require_positive(n, "n");
  const Index mn = Index{m} * n;
  Matrix k = Matrix::Zero(mn, mn);
  // a_{ij} sits at i + j m in vec(A) and at j + i n in vec(A^T).
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < n; ++j) {
      k(j + i * n, i + j * m) = 1.0;
    }
  }
  return k;
}

CenteringProjectors centering_projectors(int p) {
  require_positive(p, "p");
  const Vector v = vec(identity(p));
  CenteringProjectors out;
  out.p = v * v.transpose() / static_cast<double>(p);
  out.q = identity(Index{p} * p) - out.p;
  return out;
}

KronBlocks building_blocks(int p1, int p2) {
  require_positive(p1, "p1");
  require_positive(p2, "p2");
  const Index side = Index{p1} * p1 * p2 * p2;
  const Matrix i1 = identity(p1);
  const Matrix i2 = identity(p2);

  KronBlocks b;
  b.j1 = Matrix::Zero(side, side);
  b.k1 = Matrix::Zero(side, side);
  for (Index i = 0; i < p1; ++i) {
    for (Index j = 0; j < p1; ++j) {
      const Matrix eij = unit_outer(p1, i, j);
      const Matrix eji = unit_outer(p1, j, i);
      b.j1 += kron4(i2, eij, i2, eij);
      b.k1 += kron4(i2, eij, i2, eji);
    }
  }
  b.j2 = Matrix::Zero(side, side);
  b.k2 = Matrix::Zero(side, side);
  for (Index i = 0; i < p2; ++i) {
    for (Index j = 0; j < p2; ++j) {
      const Matrix eij = unit_outer(p2, i, j);
      const Matrix eji = unit_outer(p2, j, i);
      b.j2 += kron4(eij, i1, eij, i1);
      b.k2 += kron4(eij, i1, eji, i1);
    }
  }
  b.l1 = b.j1 / static_cast<double>(p1);
  b.l2 = b.j2 / static_cast<double>(p2);
  return b;
}

RMatrices r_matrices(int p1, int p2) {
  require_positive(p1, "p1");
  require_positive(p2, "p2");
  const Matrix k12 = commutation_matrix(p1, p2);
  const Matrix k21 = commutation_matrix(p2, p1);
  const Vector vec_i1 = vec(identity(p1));
  const Vector vec_i2 = vec(identity(p2));

  // {vec(I_{p2})^T (x) I_{p1^2}} (I_{p2} (x) K_{p2,p1} (x) I_{p1})
  const Matrix contract1 =
      kron(Matrix(vec_i2.transpose()), identity(Index{p1} * p1)) *
      kron(kron(identity(p2), k21), identity(p1));
  const Matrix contract2 =
      kron(Matrix(vec_i1.transpose()), identity(Index{p2} * p2)) *
      kron(kron(identity(p1), k12), identity(p2)) * kron(k12, k12);

  RMatrices r;
  r.r1 = centering_projectors(p1).q * contract1 / static_cast<double>(p2);
  r.r2 = centering_projectors(p2).q * contract2 / static_cast<double>(p1);
  return r;
}

WaldGeometry wald_geometry(int p1, int p2) {
  require_positive(p1, "p1");
  require_positive(p2, "p2");
  const Index side = Index{p1} * p1 * p2 * p2;
  const RMatrices r = r_matrices(p1, p2);
  const KronBlocks blocks = building_blocks(p1, p2);
  const Vector vec_i1 = vec(identity(p1));
  const Vector vec_i2 = vec(identity(p2));

  const Matrix shuffle =
      kron(kron(identity(p2), commutation_matrix(p1, p2)), identity(p1));
  const Matrix stacked = kron(r.r2, Matrix(vec_i1)) + kron(Matrix(vec_i2), r.r1);

  WaldGeometry g;
  g.p1 = p1;
  g.p2 = p2;
  g.b0 = shuffle * stacked - centering_projectors(p1 * p2).q;

  const Matrix k12 = blocks.k1 * blocks.k2;
  const Matrix eye = identity(side);
  g.g1 = 0.25 * (eye + blocks.k1 + blocks.k2 + k12);
  g.g2 = 0.25 * (eye - blocks.k1 - blocks.k2 + k12);
  g.proj1 = g.b0 * g.g1 * g.b0.transpose();
  g.proj2 = g.b0 * g.g2 * g.b0.transpose();
  return g;
}

std::shared_ptr<const WaldGeometry> cached_wald_geometry(int p1, int p2) {
  static std::shared_mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const WaldGeometry>> cache;

  const auto key = std::make_pair(p1, p2);
  {
    std::shared_lock lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  // Built outside the lock; a racing inserter simply wins.
  auto built = std::make_shared<const WaldGeometry>(wald_geometry(p1, p2));
  std::unique_lock lock(mutex);
  auto [it, inserted] = cache.emplace(key, std::move(built));
  return it->second;
}

Matrix sym_sqrt(const Matrix& a) {
  const auto eig = checked_spectrum(a);
  const Matrix& v = eig.eigenvectors();
  Matrix out = v * eig.eigenvalues().cwiseSqrt().asDiagonal() * v.transpose();
  return 0.5 * (out + out.transpose());
}

Matrix sym_inv_sqrt(const Matrix& a) {
  const auto eig = checked_spectrum(a);
  const Matrix& v = eig.eigenvectors();
  Matrix out =
      v * eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() * v.transpose();
  return 0.5 * (out + out.transpose());
}

}  // namespace separ
