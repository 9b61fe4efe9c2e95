#pragma once

// Random matrix-elliptical samples: matrix normal, matrix t, general
// matrix-spherical cores built as U diag(lambda) V^T, the affine model map
// and the shrinking local alternative.
//
// Every sampler is deterministic given its seed. Generators are never shared;
// concurrent callers derive their own seeds with split_seed.

#include "separ/covariance.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <variant>

namespace separ {

using Rng = std::mt19937_64;

/// Seed for replicate `replicate` of experiment `experiment`: a splitmix64
/// hash chain over (master, experiment, replicate). Distinct triples give
/// unrelated streams.
std::uint64_t split_seed(std::uint64_t master, std::uint64_t experiment,
                         std::uint64_t replicate) noexcept;

inline constexpr double kGaussianNu = std::numeric_limits<double>::infinity();

MatrixSample sample_matrix_normal(Index n, int p1, int p2, std::uint64_t seed);

/// Matrix t with nu degrees of freedom: Z = sqrt(nu) W^{-1/2} N where
/// W ~ Wishart_p1(I, nu + p1 - 1) and N is standard matrix normal.
///
/// Convention: with this Wishart degrees of freedom every entry of Z is a
/// scalar t_nu variable, so Var(z_ij) = nu / (nu - 2) and nu -> infinity
/// recovers the standard matrix normal. W^{-1/2} is taken as L^{-T} for the
/// Bartlett factor W = L L^T; the conditional law of Z given W only depends
/// on W^{-1}, so this is the same distribution as the symmetric root.
///
/// nu = kGaussianNu returns a matrix-normal sample. Warns once per process
/// and value when nu <= 4, where fourth moments are infinite.
MatrixSample sample_matrix_t(Index n, int p1, int p2, double nu, std::uint64_t seed);

/// First p2 columns of a Haar-distributed p1 x p1 orthogonal matrix, from the
/// QR factorization of a Gaussian matrix with R's diagonal made positive.
Matrix sample_haar_frame(int p1, int p2, Rng& rng);
Matrix sample_haar_frame(int p1, int p2, std::uint64_t seed);

/// Draws the q singular values of one spherical core. The joint law must be
/// invariant under permutations; that is the caller's responsibility.
using SingularLawSampler = std::function<Vector(Rng& rng, int q)>;

/// Always returns `values` (size must equal q).
SingularLawSampler constant_singular_law(Vector values);

/// Singular values of a p1 x p2 standard Gaussian matrix, which makes
/// sample_spherical reproduce the matrix normal.
SingularLawSampler gaussian_singular_law(int p1, int p2);

/// Z_i = U_i diag(lambda_i) V_i^T with U_i Haar p1 x p2, V_i Haar p2 x p2,
/// lambda_i one draw of `law`. Requires p1 >= p2.
MatrixSample sample_spherical(Index n, int p1, int p2, const SingularLawSampler& law,
                              std::uint64_t seed);

struct GaussianCore {};
struct MatrixTCore {
  double nu;
};
struct SphericalCore {
  SingularLawSampler law;
};
using Core = std::variant<GaussianCore, MatrixTCore, SphericalCore>;

/// X = M + sigma1^{1/2} Z sigma2^{1/2}.
struct ModelSpec {
  Matrix m;
  Matrix sigma1;
  Matrix sigma2;
  Core core = GaussianCore{};

  /// Zero mean and identity covariances.
  static ModelSpec standard(int p1, int p2, Core core = GaussianCore{});
};

MatrixSample sample_core(Index n, int p1, int p2, const Core& core, std::uint64_t seed);

/// Symmetric square roots; throws NotPositiveDefinite and DimensionMismatch.
MatrixSample apply_model(const MatrixSample& z, const ModelSpec& spec);

MatrixSample sample_model(Index n, const ModelSpec& spec, std::uint64_t seed);

/// Multiplies the (1, 1) entry of every observation by 1 + tau / sqrt(n).
MatrixSample local_alternative(const MatrixSample& sample, double tau);

}  // namespace separ
