#include "separ/kernels.hpp"

#include <doctest.h>
#include <omp.h>

#include <random>

using namespace separ;

namespace {

Matrix random_vecs(Index p, Index n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::student_t_distribution<double> t(6.0);
  Matrix m(p, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < p; ++i) m(i, j) = 1.5 + t(rng);
  return m;
}

double rel_error(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
}

// Runs f with a given OpenMP thread count and restores the previous value.
template <class F>
auto with_threads(int threads, F f) {
  const int previous = omp_get_max_threads();
  omp_set_num_threads(threads);
  auto result = f();
  omp_set_num_threads(previous);
  return result;
}

}  // namespace

TEST_CASE("block partition depends only on n") {
  CHECK(kernels::block_count(0) == 1);
  CHECK(kernels::block_count(1) == 1);
  CHECK(kernels::block_count(256) == 1);
  CHECK(kernels::block_count(257) == 2);
  CHECK(kernels::block_count(10'000'000) == 256);
}

TEST_CASE("parallel kernels agree with the serial reference") {
  for (Index n : {Index{1}, Index{7}, Index{256}, Index{1000}, Index{20'000}}) {
    CAPTURE(n);
    const Matrix x = random_vecs(6, n, 100 + static_cast<unsigned>(n));
    const Vector mean = kernels::column_mean(x);
    CHECK(rel_error(mean, kernels::reference::column_mean(x)) < 1e-12);

    const Matrix scatter = kernels::centered_scatter(x, mean);
    CHECK(rel_error(scatter, kernels::reference::centered_scatter(x, mean)) < 1e-12);
    CHECK((scatter - scatter.transpose()).cwiseAbs().maxCoeff() == 0.0);

    const auto fast = kernels::frobenius_sums(x);
    const auto slow = kernels::reference::frobenius_sums(x);
    CHECK(fast.sum_sq == doctest::Approx(slow.sum_sq).epsilon(1e-12));
    CHECK(fast.sum_sq_sq == doctest::Approx(slow.sum_sq_sq).epsilon(1e-12));
    CHECK(fast.sum_fourth == doctest::Approx(slow.sum_fourth).epsilon(1e-12));

    const Matrix small = x.topRows(3);
    CHECK(rel_error(kernels::fourth_moment_scatter(small),
                    kernels::reference::fourth_moment_scatter(small)) < 1e-12);

    const Matrix transform = random_vecs(6, 6, 5);
    CHECK(rel_error(kernels::centered_transform(x, mean, transform),
                    kernels::reference::centered_transform(x, mean, transform)) < 1e-12);
  }
}

TEST_CASE("reference kernels match explicit formulas") {
  Matrix x(2, 3);
  x << 1, 2, 6,
       0, 4, 2;
  const Vector mean = kernels::reference::column_mean(x);
  CHECK(mean(0) == 3.0);
  CHECK(mean(1) == 2.0);
  const Matrix s = kernels::reference::centered_scatter(x, mean);
  // centered columns (-2,-2), (-1,2), (3,0)
  CHECK(s(0, 0) == 14.0);
  CHECK(s(0, 1) == 2.0);
  CHECK(s(1, 1) == 8.0);
  const auto sums = kernels::reference::frobenius_sums(x);
  CHECK(sums.sum_sq == 1 + 0 + 4 + 16 + 36 + 4);
  CHECK(sums.sum_sq_sq == 1 + 400 + 1600);
  CHECK(sums.sum_fourth == 1 + 16 + 256 + 1296 + 16);

  const Matrix a = kernels::reference::fourth_moment_scatter(x.col(1));
  // z = (2, 4), z (x) z = (4, 8, 8, 16)
  Vector zz(4);
  zz << 4, 8, 8, 16;
  CHECK((a - zz * zz.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("results are bit-identical for any thread count") {
  const Matrix x = random_vecs(9, 5000, 42);
  const Vector mean = kernels::column_mean(x);
  const Matrix one = with_threads(1, [&] { return kernels::centered_scatter(x, mean); });
  const Matrix four = with_threads(4, [&] { return kernels::centered_scatter(x, mean); });
  CHECK(one == four);
  const auto f1 = with_threads(1, [&] { return kernels::frobenius_sums(x); });
  const auto f3 = with_threads(3, [&] { return kernels::frobenius_sums(x); });
  CHECK(f1.sum_sq == f3.sum_sq);
  CHECK(f1.sum_sq_sq == f3.sum_sq_sq);
  CHECK(f1.sum_fourth == f3.sum_fourth);
  const Matrix small = x.topRows(4);
  const Matrix a1 = with_threads(1, [&] { return kernels::fourth_moment_scatter(small); });
  const Matrix a2 = with_threads(2, [&] { return kernels::fourth_moment_scatter(small); });
  CHECK(a1 == a2);
}
