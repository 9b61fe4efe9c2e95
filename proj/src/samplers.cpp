#include "separ/samplers.hpp"

#include "separ/error.hpp"

#include <cmath>
#include <iostream>
#include <mutex>
#include <set>

namespace separ {
namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void fill_normal(Rng& rng, double* data, Index size) {
  std::normal_distribution<double> normal;
  for (Index k = 0; k < size; ++k) data[k] = normal(rng);
}

Matrix normal_matrix(Rng& rng, Index rows, Index cols) {
  Matrix out(rows, cols);
  fill_normal(rng, out.data(), out.size());
  return out;
}

void check_shape(Index n, int p1, int p2) {
  if (n < 1 || p1 < 1 || p2 < 1) {
    throw Error(ErrorKind::InvalidArgument, "sample size and dimensions must be positive");
  }
}

void warn_heavy_tails(double nu) {
  static std::mutex mutex;
  static std::set<double> seen;
  std::lock_guard lock(mutex);
  if (seen.insert(nu).second) {
    std::cerr << "warning: matrix t with nu = " << nu
              << " has infinite fourth moments; asymptotic null laws do not apply\n";
  }
}

}  // namespace

std::uint64_t split_seed(std::uint64_t master, std::uint64_t experiment,
                         std::uint64_t replicate) noexcept {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ experiment);
  return splitmix64(h ^ replicate);
}

MatrixSample sample_matrix_normal(Index n, int p1, int p2, std::uint64_t seed) {
  check_shape(n, p1, p2);
  Rng rng(seed);
  return MatrixSample(p1, p2, normal_matrix(rng, Index{p1} * p2, n));
}

MatrixSample sample_matrix_t(Index n, int p1, int p2, double nu, std::uint64_t seed) {
  if (std::isinf(nu) && nu > 0) return sample_matrix_normal(n, p1, p2, seed);
  if (!(nu > 0)) throw Error(ErrorKind::InvalidArgument, "nu must be positive");
  check_shape(n, p1, p2);
  if (nu <= 4) warn_heavy_tails(nu);

  Rng rng(seed);
  const double wishart_df = nu + p1 - 1;
  const double scale = std::sqrt(nu);
  Matrix vecs = normal_matrix(rng, Index{p1} * p2, n);
  std::normal_distribution<double> normal;
  Matrix l = Matrix::Zero(p1, p1);
  for (Index i = 0; i < n; ++i) {
    // Bartlett: W = L L^T with L_jj^2 ~ chi2(df - j), L_jk ~ N(0, 1) below.
    for (int j = 0; j < p1; ++j) {
      std::chi_squared_distribution<double> chi2(wishart_df - j);
      l(j, j) = std::sqrt(chi2(rng));
      for (int k = 0; k < j; ++k) l(j, k) = normal(rng);
    }
    Eigen::Map<Matrix> z(vecs.col(i).data(), p1, p2);
    l.triangularView<Eigen::Lower>().transpose().solveInPlace(z);
    z *= scale;
  }
  return MatrixSample(p1, p2, std::move(vecs));
}

Matrix sample_haar_frame(int p1, int p2, Rng& rng) {
  if (p2 < 1 || p1 < p2) throw Error(ErrorKind::InvalidArgument, "need p1 >= p2 >= 1");
  Eigen::HouseholderQR<Matrix> qr(normal_matrix(rng, p1, p2));
  Matrix q = qr.householderQ() * Matrix::Identity(p1, p2);
  const Matrix& r = qr.matrixQR();
  for (int j = 0; j < p2; ++j) {
    if (r(j, j) < 0) q.col(j) *= -1.0;
  }
  return q;
}

Matrix sample_haar_frame(int p1, int p2, std::uint64_t seed) {
  Rng rng(seed);
  return sample_haar_frame(p1, p2, rng);
}

SingularLawSampler constant_singular_law(Vector values) {
  return [values = std::move(values)](Rng&, int q) -> Vector {
    if (values.size() != q) {
      throw Error(ErrorKind::DimensionMismatch, "constant singular law has the wrong length");
    }
    return values;
  };
}

SingularLawSampler gaussian_singular_law(int p1, int p2) {
  return [p1, p2](Rng& rng, int q) -> Vector {
    if (q != std::min(p1, p2)) {
      throw Error(ErrorKind::DimensionMismatch, "gaussian singular law has the wrong length");
    }
    Eigen::JacobiSVD<Matrix> svd(normal_matrix(rng, p1, p2));
    return svd.singularValues();
  };
}

MatrixSample sample_spherical(Index n, int p1, int p2, const SingularLawSampler& law,
                              std::uint64_t seed) {
  check_shape(n, p1, p2);
  if (p1 < p2) throw Error(ErrorKind::InvalidArgument, "spherical sampler needs p1 >= p2");
  Rng rng(seed);
  Matrix vecs(Index{p1} * p2, n);
  for (Index i = 0; i < n; ++i) {
    const Matrix u = sample_haar_frame(p1, p2, rng);
    const Matrix v = sample_haar_frame(p2, p2, rng);
    const Vector lambda = law(rng, p2);
    if (lambda.size() != p2) {
      throw Error(ErrorKind::DimensionMismatch, "singular law returned the wrong length");
    }
    Eigen::Map<Matrix>(vecs.col(i).data(), p1, p2) =
        u * lambda.asDiagonal() * v.transpose();
  }
  return MatrixSample(p1, p2, std::move(vecs));
}

ModelSpec ModelSpec::standard(int p1, int p2, Core core) {
  return ModelSpec{Matrix::Zero(p1, p2), Matrix::Identity(p1, p1), Matrix::Identity(p2, p2),
                   std::move(core)};
}

MatrixSample sample_core(Index n, int p1, int p2, const Core& core, std::uint64_t seed) {
  if (std::holds_alternative<GaussianCore>(core)) return sample_matrix_normal(n, p1, p2, seed);
  if (const auto* t = std::get_if<MatrixTCore>(&core)) {
    return sample_matrix_t(n, p1, p2, t->nu, seed);
  }
  return sample_spherical(n, p1, p2, std::get<SphericalCore>(core).law, seed);
}

MatrixSample apply_model(const MatrixSample& z, const ModelSpec& spec) {
  const int p1 = z.p1();
  const int p2 = z.p2();
  if (spec.sigma1.rows() != p1 || spec.sigma1.cols() != p1 || spec.sigma2.rows() != p2 ||
      spec.sigma2.cols() != p2 || spec.m.rows() != p1 || spec.m.cols() != p2) {
    throw Error(ErrorKind::DimensionMismatch, "model spec does not match the sample shape");
  }
  // vec(A1 Z A2) = (A2 (x) A1) vec(Z), A2 symmetric.
  const Matrix transform = kron(sym_sqrt(spec.sigma2), sym_sqrt(spec.sigma1));
  Matrix vecs = transform * z.vecs();
  vecs.colwise() += vec(spec.m);
  return MatrixSample(p1, p2, std::move(vecs));
}

MatrixSample sample_model(Index n, const ModelSpec& spec, std::uint64_t seed) {
  const auto p1 = static_cast<int>(spec.sigma1.rows());
  const auto p2 = static_cast<int>(spec.sigma2.rows());
  return apply_model(sample_core(n, p1, p2, spec.core, seed), spec);
}

MatrixSample local_alternative(const MatrixSample& sample, double tau) {
  if (!(tau >= 0)) throw Error(ErrorKind::InvalidArgument, "tau must be non-negative");
  Matrix vecs = sample.vecs();
  vecs.row(0) *= 1.0 + tau / std::sqrt(static_cast<double>(sample.n()));
  return MatrixSample(sample.p1(), sample.p2(), std::move(vecs));
}

}  // namespace separ
