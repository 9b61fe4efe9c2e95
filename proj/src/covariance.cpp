#include "separ/covariance.hpp"

#include "separ/error.hpp"
#include "separ/kernels.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace separ {
namespace {

Eigen::LLT<Matrix> cholesky_or(const Matrix& a, ErrorKind kind, const char* what) {
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success || !llt.matrixLLT().diagonal().allFinite() ||
      (llt.matrixLLT().diagonal().array() <= 0.0).any()) {
    throw Error(kind, std::string(what) + " is not positive definite");
  }
  return llt;
}

double log_det(const Eigen::LLT<Matrix>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

Matrix symmetrized(const Matrix& a) { return 0.5 * (a + a.transpose()); }

double relative_change(const Matrix& now, const Matrix& before) {
  return (now - before).norm() / before.norm();
}

}  // namespace

MatrixSample::MatrixSample(int p1, int p2, Matrix vecs)
    : p1_(p1), p2_(p2), vecs_(std::move(vecs)) {
  if (p1 < 1 || p2 < 1) {
    throw Error(ErrorKind::InvalidArgument, "dimensions must be positive");
  }
  if (vecs_.rows() != Index{p1} * p2) {
    throw Error(ErrorKind::DimensionMismatch,
                "sample rows must equal p1*p2 = " + std::to_string(p1 * p2));
  }
  if (vecs_.cols() < 1) {
    throw Error(ErrorKind::SampleTooSmall, "sample is empty");
  }
  if (!vecs_.allFinite()) {
    throw Error(ErrorKind::InvalidArgument, "sample has non-finite entries");
  }
}

MatrixSample MatrixSample::from_matrices(const std::vector<Matrix>& observations) {
  if (observations.empty()) {
    throw Error(ErrorKind::SampleTooSmall, "sample is empty");
  }
  const Index rows = observations.front().rows();
  const Index cols = observations.front().cols();
  Matrix vecs(rows * cols, static_cast<Index>(observations.size()));
  for (std::size_t i = 0; i < observations.size(); ++i) {
    if (observations[i].rows() != rows || observations[i].cols() != cols) {
      throw Error(ErrorKind::DimensionMismatch,
                  "observation " + std::to_string(i) + " has a different shape");
    }
    vecs.col(static_cast<Index>(i)) = vec(observations[i]);
  }
  return MatrixSample(static_cast<int>(rows), static_cast<int>(cols), std::move(vecs));
}

Eigen::Map<const Matrix> MatrixSample::observation(Index i) const {
  return Eigen::Map<const Matrix>(vecs_.col(i).data(), p1_, p2_);
}

MatrixSample MatrixSample::transposed() const {
  Matrix out(vecs_.rows(), vecs_.cols());
  for (Index i = 0; i < p1_; ++i) {
    for (Index j = 0; j < p2_; ++j) {
      out.row(j + i * p2_) = vecs_.row(i + j * p1_);
    }
  }
  return MatrixSample(p2_, p1_, std::move(out));
}

Matrix sample_covariance(const MatrixSample& sample) {
  if (sample.n() < 2) {
    throw Error(ErrorKind::SampleTooSmall, "sample covariance needs n >= 2");
  }
  const Vector mean = kernels::column_mean(sample.vecs());
  return kernels::centered_scatter(sample.vecs(), mean) /
         static_cast<double>(sample.n());
}

SeparableFit flip_flop_mle(const MatrixSample& sample, const FlipFlopOptions& options) {
  return flip_flop_from_covariance(sample_covariance(sample), sample.p1(),
                                   sample.p2(), options);
}

SeparableFit flip_flop_from_covariance(const Matrix& sn, int p1, int p2,
                                       const FlipFlopOptions& options) {
  const Index p = Index{p1} * p2;
  if (p1 < 1 || p2 < 1 || sn.rows() != p || sn.cols() != p) {
    throw Error(ErrorKind::DimensionMismatch, "S_n must be (p1 p2) x (p1 p2)");
  }
  if (!sn.allFinite()) {
    throw Error(ErrorKind::InvalidArgument, "S_n has non-finite entries");
  }
  if (options.tol <= 0.0 || options.max_iter < 1) {
    throw Error(ErrorKind::InvalidArgument, "flip-flop needs tol > 0 and max_iter >= 1");
  }

  // (1/(n p2)) sum_i X_i W X_i^T
  auto row_update = [&](const Matrix& w) {
    Matrix out = Matrix::Zero(p1, p1);
    for (Index l = 0; l < p2; ++l) {
      for (Index k = 0; k < p2; ++k) {
        out += w(k, l) * sn.block(k * p1, l * p1, p1, p1);
      }
    }
    return symmetrized(out / static_cast<double>(p2));
  };
  // (1/(n p1)) sum_i X_i^T W X_i
  auto column_update = [&](const Matrix& w) {
    Matrix out(p2, p2);
    for (Index l = 0; l < p2; ++l) {
      for (Index k = 0; k < p2; ++k) {
        out(k, l) = w.cwiseProduct(sn.block(k * p1, l * p1, p1, p1)).sum();
      }
    }
    return symmetrized(out / static_cast<double>(p1));
  };
  auto inverse = [](const Eigen::LLT<Matrix>& llt, Index dim) {
    return symmetrized(llt.solve(Matrix::Identity(dim, dim)));
  };

  SeparableFit fit;
  Matrix next_s1 = row_update(Matrix::Identity(p2, p2));
  Matrix prev_s1;
  Matrix prev_s2;
  double change = std::numeric_limits<double>::infinity();
  double residual = std::numeric_limits<double>::infinity();

  for (int it = 1; it <= options.max_iter; ++it) {
    const auto llt1 = cholesky_or(next_s1, ErrorKind::SingularIterate, "row factor iterate");
    Matrix s2 = column_update(inverse(llt1, p1));
    const auto llt2 = cholesky_or(s2, ErrorKind::SingularIterate, "column factor iterate");

    // Move the scale into s2 so that det(s1) = 1; the pair still solves the
    // column equation exactly.
    const double scale = std::exp(log_det(llt1) / p1);
    Matrix s1 = next_s1 / scale;
    s2 *= scale;

    next_s1 = row_update(inverse(llt2, p2) / scale);
    residual = relative_change(next_s1, s1);
    fit.residual_history.push_back(residual);
    if (it > 1) {
      change = relative_change(s1, prev_s1) + relative_change(s2, prev_s2);
    }
    if (!std::isfinite(residual)) {
      throw Error(ErrorKind::SingularIterate, "flip-flop iterate became non-finite");
    }
    if (change <= options.tol && residual <= options.tol) {
      fit.s1 = std::move(s1);
      fit.s2 = std::move(s2);
      fit.iterations = it;
      fit.final_residual = residual;
      return fit;
    }
    prev_s1 = std::move(s1);
    prev_s2 = std::move(s2);
  }
  throw Error(ErrorKind::NoConvergence,
              "flip-flop did not converge in " + std::to_string(options.max_iter) +
                  " iterations (residual " + std::to_string(residual) + ")");
}

Matrix det_normalize(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw Error(ErrorKind::InvalidArgument, "det_normalize expects a square matrix");
  }
  const auto llt = cholesky_or(a, ErrorKind::NotPositiveDefinite, "matrix");
  return a * std::exp(-log_det(llt) / static_cast<double>(a.rows()));
}

ComparisonMatrix comparison_matrix(const Matrix& sn, const SeparableFit& fit) {
  const Index p = fit.s1.rows() * fit.s2.rows();
  if (sn.rows() != p || sn.cols() != p) {
    throw Error(ErrorKind::DimensionMismatch, "S_n does not match the fit dimensions");
  }
  const Matrix whitener = sym_inv_sqrt(det_normalize(sn));
  const Matrix structured = kron(det_normalize(fit.s2), det_normalize(fit.s1));
  return {symmetrized(whitener * structured * whitener)};
}

}  // namespace separ
