// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Criteria 7-9 run 2000-replicate simulations and dominate
// the runtime.

#include "separ/harness.hpp"
#include "separ/verification.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

using namespace separ;

namespace {

constexpr std::uint64_t kSeed = 1;

struct Outcome {
  bool passed;
  std::string detail;
};

double max_abs(const Matrix& a) { return a.cwiseAbs().maxCoeff(); }

Outcome summarize(const std::vector<CheckResult>& checks) {
  int failed = 0;
  double worst_ratio = 0.0;
  std::string worst;
  for (const auto& c : checks) {
    failed += !c.passed;
    const double ratio = c.tolerance > 0 ? c.error / c.tolerance : 0.0;
    if (ratio >= worst_ratio) {
      worst_ratio = ratio;
      std::ostringstream os;
      os << c.name << ": error " << c.error << " vs tol " << c.tolerance;
      worst = os.str();
    }
    if (!c.passed) std::printf("    failed check: %s (error %g, tol %g)\n", c.name.c_str(), c.error, c.tolerance);
  }
  std::ostringstream os;
  os << checks.size() - failed << "/" << checks.size() << " checks; tightest " << worst;
  return {failed == 0, os.str()};
}

Outcome criterion1() {
  bool ok = norm_test_dfs(3, 3).d1 == 25 && norm_test_dfs(3, 3).d2 == 9 &&
            norm_test_dfs(5, 5).d1 == 196 && norm_test_dfs(5, 5).d2 == 100 &&
            wald_df(3, 3) == 34 && wald_df(5, 5) == 296;
  int mismatches = 0;
  for (int p1 = 1; p1 <= 6; ++p1)
    for (int p2 = 1; p2 <= 6; ++p2) {
      const NormTestDfs d = norm_test_dfs(p1, p2);
      mismatches += wald_df(p1, p2) != d.d1 + d.d2;
    }
  ok = ok && mismatches == 0;
  return {ok, "(25,9), (196,100), 34, 296; wald_df = d1 + d2 mismatches over {1..6}^2: " +
                  std::to_string(mismatches)};
}

Outcome criterion2() {
  bool ok = true;
  std::ostringstream os;
  for (auto [p1, p2] : {std::pair{2, 2}, std::pair{2, 3}, std::pair{3, 3}}) {
    const WaldGeometry g = wald_geometry(p1, p2);
    const KronBlocks b = building_blocks(p1, p2);
    const Index side = g.b0.cols();
    const Matrix eye = Matrix::Identity(side, side);
    const double simplified =
        max_abs(g.b0.transpose() * g.b0 - (eye - b.l1 - b.l2 + b.l1 * b.l2));
    const double idem = std::max(max_abs(g.proj1 * g.proj1 - g.proj1),
                                 max_abs(g.proj2 * g.proj2 - g.proj2));
    const double sym = std::max(max_abs(g.proj1 - g.proj1.transpose()),
                                max_abs(g.proj2 - g.proj2.transpose()));
    const double orth = max_abs(g.proj1 * g.proj2);
    const NormTestDfs d = norm_test_dfs(p1, p2);
    const double trace_err = std::max(std::abs(g.proj1.trace() - d.d1),
                                      std::abs(g.proj2.trace() - d.d2));
    ok = ok && simplified <= 1e-12 && idem <= 1e-12 && sym <= 1e-12 && orth <= 1e-12 &&
         trace_err <= 1e-10;
    os << "(" << p1 << "," << p2 << ") B0'B0 err " << simplified << ", traces "
       << g.proj1.trace() << "/" << g.proj2.trace() << "; ";
  }
  return {ok, os.str()};
}

Outcome criterion6() {
  const MatrixSample x = sample_matrix_normal(100'000, 3, 3, split_seed(kSeed, 6, 0));
  SeparabilityAnalysis analysis(x);
  const MomentEstimates& m = analysis.moments();
  std::ostringstream os;
  os << "t1 = " << m.t1 << ", t2 = " << m.t2 << " (target 2 +- 0.1)";
  return {std::abs(m.t1 - 2.0) <= 0.1 && std::abs(m.t2 - 2.0) <= 0.1, os.str()};
}

SimulationConfig grid(Index n, double nu, std::vector<double> taus, std::vector<Method> methods) {
  SimulationConfig c;
  c.dims = {{3, 3}};
  c.sample_sizes = {n};
  c.nus = {nu};
  c.taus = std::move(taus);
  c.methods = std::move(methods);
  c.replicates = 2000;
  c.level = 0.05;
  c.master_seed = kSeed;
  return c;
}

double rate(const RejectionTable& t, Method m, double tau) {
  for (const auto& row : t.rows)
    if (row.method == m && row.tau == tau) return row.rate;
  return NAN;
}

long failures(const RejectionTable& t) {
  long total = 0;
  for (const auto& row : t.rows) total += row.failures;
  return total;
}

Outcome criterion7() {
  const RejectionTable t =
      run_simulation(grid(3200, kGaussianNu, {0.0}, {Method::norm, Method::wald, Method::lrt}));
  const double norm = rate(t, Method::norm, 0), wald = rate(t, Method::wald, 0),
               lrt = rate(t, Method::lrt, 0);
  std::ostringstream os;
  os << "Gaussian n=3200: norm " << norm << " in [0.035,0.065], wald " << wald
     << " in [0.03,0.07], lrt " << lrt << " in [0.035,0.065]; failures " << failures(t);
  const bool ok = norm >= 0.035 && norm <= 0.065 && wald >= 0.03 && wald <= 0.07 &&
                  lrt >= 0.035 && lrt <= 0.065;
  return {ok, os.str()};
}

Outcome criterion8() {
  const RejectionTable t = run_simulation(grid(3200, 5.0, {0.0}, {Method::norm, Method::lrt}));
  const double norm = rate(t, Method::norm, 0), lrt = rate(t, Method::lrt, 0);
  std::ostringstream os;
  os << "matrix-t nu=5 n=3200: lrt " << lrt << " > 0.10, norm " << norm << " < 0.08; failures "
     << failures(t);
  return {lrt > 0.10 && norm < 0.08, os.str()};
}

Outcome criterion9() {
  const RejectionTable t =
      run_simulation(grid(1600, kGaussianNu, {0.0, 5.0}, {Method::norm, Method::wald}));
  const double n0 = rate(t, Method::norm, 0), n5 = rate(t, Method::norm, 5);
  const double w0 = rate(t, Method::wald, 0), w5 = rate(t, Method::wald, 5);
  std::ostringstream os;
  os << "Gaussian n=1600: norm " << n0 << " -> " << n5 << ", wald " << w0 << " -> " << w5
     << " (gain >= 0.05)";
  return {n5 - n0 >= 0.05 && w5 - w0 >= 0.05, os.str()};
}

Outcome criterion10() {
  double worst_t = 0.0, worst_w = 0.0;
  Rng rng(split_seed(kSeed, 10, 0));
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<int> dim(2, 4);
  auto random = [&](Index r, Index c) {
    Matrix a(r, c);
    for (Index j = 0; j < c; ++j)
      for (Index i = 0; i < r; ++i) a(i, j) = normal(rng);
    return a;
  };
  for (int rep = 0; rep < 50; ++rep) {
    const int p1 = dim(rng), p2 = dim(rng);
    const Index n = 40 + 10 * p1 * p2;
    const Core core = rep % 2 == 0 ? Core{GaussianCore{}} : Core{MatrixTCore{6.0}};
    const MatrixSample x = sample_core(n, p1, p2, core, split_seed(kSeed, 10, rep + 1));
    Matrix a1 = random(p1, p1), a2 = random(p2, p2);
    while (std::abs(a1.determinant()) < 0.1) a1 = random(p1, p1);
    while (std::abs(a2.determinant()) < 0.1) a2 = random(p2, p2);
    Matrix vecs = kron(a2, a1) * x.vecs();
    vecs.colwise() += vec(random(p1, p2));
    const MatrixSample y(p1, p2, std::move(vecs));

    SeparabilityAnalysis ax(x), ay(y);
    auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(a), 1e-300); };
    worst_t = std::max(worst_t, rel(ax.norm_test().statistic, ay.norm_test().statistic));
    worst_w = std::max(worst_w, rel(ax.wald_test().statistic, ay.wald_test().statistic));
  }
  std::ostringstream os;
  os << "50 datasets, worst relative change t_n " << worst_t << ", w_n " << worst_w
     << " (tol 1e-6)";
  return {worst_t <= 1e-6 && worst_w <= 1e-6, os.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"degrees-of-freedom identities", criterion1},
      {"Wald geometry", criterion2},
      {"fourth-moment matrix oracle", [] { return summarize(verify_fourth_moment_matrix(kSeed)); }},
      {"closed-form moment suite",
       [] {
         auto checks = verify_haar(kSeed);
         auto more = verify_moments(kSeed);
         checks.insert(checks.end(), more.begin(), more.end());
         return summarize(checks);
       }},
      {"mixture CDF", [] { return summarize(verify_mixture_cdf(kSeed)); }},
      {"Gaussian coefficient recovery", criterion6},
      {"level at desk scale", criterion7},
      {"robustness contrast", criterion8},
      {"local power monotonicity", criterion9},
      {"affine invariance", criterion10},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !outcome.passed;
    std::printf("criterion %2zu %s  %s: %s [%.1f s]\n", i + 1, outcome.passed ? "PASS" : "FAIL",
                criteria[i].first.c_str(), outcome.detail.c_str(), seconds);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
