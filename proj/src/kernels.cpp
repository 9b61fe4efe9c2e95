#include "separ/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <vector>

namespace separ::kernels {
namespace {

constexpr Index kMinBlock = 256;
constexpr Index kMaxBlocks = 256;

struct Range {
  Index begin;
  Index end;
};

Range block_range(Index n, Index blocks, Index b) {
  const Index base = n / blocks;
  const Index extra = n % blocks;
  const Index begin = b * base + std::min(b, extra);
  return {begin, begin + base + (b < extra ? 1 : 0)};
}

// Reduces body(range, partial) over a fixed partition of [0, n). Partials are
// combined in block order so the floating-point result never depends on the
// schedule.
template <class Partial, class MakeZero, class Body>
Partial blocked_reduce(Index n, MakeZero make_zero, Body body) {
  const Index blocks = block_count(n);
  std::vector<Partial> partials(static_cast<std::size_t>(blocks));
#pragma omp parallel for schedule(static) if (blocks > 1)
  for (Index b = 0; b < blocks; ++b) {
    Partial local = make_zero();
    body(block_range(n, blocks, b), local);
    partials[static_cast<std::size_t>(b)] = std::move(local);
  }
  Partial total = make_zero();
  for (const auto& p : partials) total += p;
  return total;
}

}  // namespace

Index block_count(Index n) {
  if (n <= 0) return 1;
  return std::clamp<Index>((n + kMinBlock - 1) / kMinBlock, 1, kMaxBlocks);
}

Vector column_mean(const Matrix& vecs) {
  const Index p = vecs.rows();
  Vector sum = blocked_reduce<Vector>(
      vecs.cols(), [p] { return Vector::Zero(p).eval(); },
      [&](Range r, Vector& acc) {
        acc += vecs.middleCols(r.begin, r.end - r.begin).rowwise().sum();
      });
  return sum / static_cast<double>(vecs.cols());
}

Matrix centered_scatter(const Matrix& vecs, const Vector& mean) {
  const Index p = vecs.rows();
  Matrix out = blocked_reduce<Matrix>(
      vecs.cols(), [p] { return Matrix::Zero(p, p).eval(); },
      [&](Range r, Matrix& acc) {
        const Matrix c =
            vecs.middleCols(r.begin, r.end - r.begin).colwise() - mean;
        acc.selfadjointView<Eigen::Lower>().rankUpdate(c);
      });
  out.triangularView<Eigen::StrictlyUpper>() = out.transpose();
  return out;
}

FrobeniusSums frobenius_sums(const Matrix& vecs) {
  return blocked_reduce<FrobeniusSums>(
      vecs.cols(), [] { return FrobeniusSums{}; },
      [&](Range r, FrobeniusSums& acc) {
        for (Index i = r.begin; i < r.end; ++i) {
          const auto col = vecs.col(i);
          const double sq = col.squaredNorm();
          acc.sum_sq += sq;
          acc.sum_sq_sq += sq * sq;
          acc.sum_fourth += col.array().square().square().sum();
        }
      });
}

Matrix fourth_moment_scatter(const Matrix& vecs) {
  const Index p = vecs.rows();
  const Index q = p * p;
  Matrix out = blocked_reduce<Matrix>(
      vecs.cols(), [q] { return Matrix::Zero(q, q).eval(); },
      [&](Range r, Matrix& acc) {
        const Index m = r.end - r.begin;
        Matrix w(q, m);
        for (Index k = 0; k < m; ++k) {
          const auto z = vecs.col(r.begin + k);
          for (Index b = 0; b < p; ++b) {
            w.col(k).segment(b * p, p) = z(b) * z;
          }
        }
        acc.selfadjointView<Eigen::Lower>().rankUpdate(w);
      });
  out.triangularView<Eigen::StrictlyUpper>() = out.transpose();
  return out;
}

Matrix centered_transform(const Matrix& vecs, const Vector& mean,
                          const Matrix& transform) {
  Matrix out(transform.rows(), vecs.cols());
  const Index n = vecs.cols();
  const Index blocks = block_count(n);
#pragma omp parallel for schedule(static) if (blocks > 1)
  for (Index b = 0; b < blocks; ++b) {
    const Range r = block_range(n, blocks, b);
    const Index m = r.end - r.begin;
    out.middleCols(r.begin, m).noalias() =
        transform * (vecs.middleCols(r.begin, m).colwise() - mean);
  }
  return out;
}

}  // namespace separ::kernels
