#include "separ/kernels.hpp"

namespace separ::kernels::reference {

Vector column_mean(const Matrix& vecs) {
  Vector sum = Vector::Zero(vecs.rows());
  for (Index i = 0; i < vecs.cols(); ++i) {
    for (Index r = 0; r < vecs.rows(); ++r) sum(r) += vecs(r, i);
  }
  return sum / static_cast<double>(vecs.cols());
}

Matrix centered_scatter(const Matrix& vecs, const Vector& mean) {
  const Index p = vecs.rows();
  Matrix out = Matrix::Zero(p, p);
  Vector c(p);
  for (Index i = 0; i < vecs.cols(); ++i) {
    for (Index r = 0; r < p; ++r) c(r) = vecs(r, i) - mean(r);
    for (Index b = 0; b < p; ++b) {
      for (Index a = b; a < p; ++a) out(a, b) += c(a) * c(b);
    }
  }
  for (Index b = 0; b < p; ++b) {
    for (Index a = b + 1; a < p; ++a) out(b, a) = out(a, b);
  }
  return out;
}

FrobeniusSums frobenius_sums(const Matrix& vecs) {
  FrobeniusSums s;
  for (Index i = 0; i < vecs.cols(); ++i) {
    double sq = 0.0;
    double fourth = 0.0;
    for (Index r = 0; r < vecs.rows(); ++r) {
      const double y2 = vecs(r, i) * vecs(r, i);
      sq += y2;
      fourth += y2 * y2;
    }
    s.sum_sq += sq;
    s.sum_sq_sq += sq * sq;
    s.sum_fourth += fourth;
  }
  return s;
}

Matrix fourth_moment_scatter(const Matrix& vecs) {
  const Index p = vecs.rows();
  const Index q = p * p;
  Matrix out = Matrix::Zero(q, q);
  Vector w(q);
  for (Index i = 0; i < vecs.cols(); ++i) {
    // vec(z) (x) vec(z): entry a + b p holds z_b z_a
    for (Index b = 0; b < p; ++b) {
      for (Index a = 0; a < p; ++a) w(a + b * p) = vecs(b, i) * vecs(a, i);
    }
    for (Index c = 0; c < q; ++c) {
      for (Index r = 0; r < q; ++r) out(r, c) += w(r) * w(c);
    }
  }
  return out;
}

Matrix centered_transform(const Matrix& vecs, const Vector& mean,
                          const Matrix& transform) {
  Matrix out = Matrix::Zero(transform.rows(), vecs.cols());
  for (Index i = 0; i < vecs.cols(); ++i) {
    for (Index k = 0; k < vecs.rows(); ++k) {
      const double c = vecs(k, i) - mean(k);
      for (Index r = 0; r < transform.rows(); ++r) out(r, i) += transform(r, k) * c;
    }
  }
  return out;
}

}  // namespace separ::kernels::reference
