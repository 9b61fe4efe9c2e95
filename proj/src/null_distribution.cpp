#include "separ/null_distribution.hpp"

#include "separ/error.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace separ {
namespace {

constexpr unsigned kPanelDepth = 12;
constexpr long kMaxPanels = 100000;

using Quadrature = boost::math::quadrature::gauss_kronrod<double, 31>;

// Bisects [a, b] until the Gauss-Kronrod error estimate of every piece is
// within its share of the absolute budget or the depth runs out.
template <class F>
double integrate_panel(const F& f, double a, double b, double budget, unsigned depth,
                       double& error) {
  double estimate = 0.0;
  const double value = Quadrature::integrate(f, a, b, 0, 0.0, &estimate);
  if (estimate <= budget || depth == 0) {
    error += estimate;
    return value;
  }
  const double mid = 0.5 * (a + b);
  return integrate_panel(f, a, mid, 0.5 * budget, depth - 1, error) +
         integrate_panel(f, mid, b, 0.5 * budget, depth - 1, error);
}

void require_positive_dims(int p1, int p2) {
  if (p1 < 1 || p2 < 1) {
    throw Error(ErrorKind::InvalidArgument, "dimensions must be positive");
  }
}

}  // namespace

MixtureSpec::MixtureSpec(std::vector<ChiSquareTerm> terms) {
  for (const auto& term : terms) {
    if (!std::isfinite(term.weight) || term.weight < 0.0 || term.df < 0) {
      throw Error(ErrorKind::InvalidArgument,
                  "mixture weights must be finite and nonnegative, dfs nonnegative");
    }
    if (term.weight > 0.0 && term.df > 0) terms_.push_back(term);
  }
}

std::string MixtureSpec::describe() const {
  if (terms_.empty()) return "point mass at 0";
  std::ostringstream os;
  os.precision(6);
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (i > 0) os << " + ";
    os << terms_[i].weight << "*chi2_" << terms_[i].df;
  }
  return os.str();
}

NormTestDfs norm_test_dfs(int p1, int p2) {
  require_positive_dims(p1, p2);
  const long a = p1;
  const long b = p2;
  return {(a + 2) * (a - 1) * (b + 2) * (b - 1) / 4, a * b * (a - 1) * (b - 1) / 4};
}

long wald_df(int p1, int p2) {
  require_positive_dims(p1, p2);
  const long a = p1;
  const long b = p2;
  return ((a * a - 1) * (b * b - 1) + (a - 1) * (b - 1)) / 2;
}

double chi2_sf(double x, double df) {
  if (!(df > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "chi-square df must be positive");
  }
  if (std::isnan(x)) {
    throw Error(ErrorKind::InvalidArgument, "chi-square argument is NaN");
  }
  if (x <= 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return boost::math::gamma_q(0.5 * df, 0.5 * x);
}

double mixture_sf(double t, const MixtureSpec& spec, double tol) {
  if (std::isnan(t)) {
    throw Error(ErrorKind::InvalidArgument, "mixture_sf argument is NaN");
  }
  if (!(tol > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "mixture_sf tolerance must be positive");
  }
  if (spec.empty()) return t < 0.0 ? 1.0 : 0.0;
  if (t <= 0.0) return 1.0;
  if (std::isinf(t)) return 0.0;

  // P(Q > t) = 1/2 + (1/pi) int_0^inf sin(theta(u)) / (u rho(u)) du with
  //   theta(u) = sum_j d_j atan(a_j u) / 2 - t u / 2,
  //   rho(u)   = prod_j (1 + a_j^2 u^2)^{d_j / 4}.
  double k = 0.0;          // half the total degrees of freedom
  double log_scale = 0.0;  // sum_j (d_j / 2) log a_j
  double slope0 = 0.0;     // theta'(0) + t / 2
  for (const auto& term : spec.terms()) {
    k += 0.5 * static_cast<double>(term.df);
    log_scale += 0.5 * static_cast<double>(term.df) * std::log(term.weight);
    slope0 += 0.5 * static_cast<double>(term.df) * term.weight;
  }

  auto integrand = [&](double u) {
    if (u == 0.0) return slope0 - 0.5 * t;
    double theta = -0.5 * t * u;
    double log_rho = 0.0;
    for (const auto& term : spec.terms()) {
      const double d = static_cast<double>(term.df);
      const double au = term.weight * u;
      theta += 0.5 * d * std::atan(au);
      log_rho += 0.25 * d * std::log1p(au * au);
    }
    return std::sin(theta) / (u * std::exp(log_rho));
  };

  // |int_U^inf| <= 1 / (pi k U^k prod a_j^{d_j/2}); spend a quarter of the
  // budget on the truncated tail.
  const double tail_budget = 0.25 * tol;
  const double upper =
      std::exp((-std::log(std::numbers::pi * k) - log_scale - std::log(tail_budget)) / k);
  const double tail_bound =
      std::exp(-std::log(std::numbers::pi * k) - k * std::log(upper) - log_scale);

  // Panels of roughly one oscillation of the integrand.
  const double frequency = std::max({0.5 * t, slope0, 1e-300});
  double width = 2.0 * std::numbers::pi / frequency;
  long panels = static_cast<long>(std::ceil(upper / width));
  if (panels > kMaxPanels) {
    panels = kMaxPanels;
  }
  panels = std::max(panels, 1L);
  width = upper / static_cast<double>(panels);

  // Half the budget for quadrature, split evenly over the panels (the
  // integral is divided by pi afterwards).
  const double panel_budget = 0.5 * tol * std::numbers::pi / static_cast<double>(panels);
  double integral = 0.0;
  double error = 0.0;
  for (long i = 0; i < panels; ++i) {
    const double a = width * static_cast<double>(i);
    const double b = (i + 1 == panels) ? upper : a + width;
    integral += integrate_panel(integrand, a, b, panel_budget, kPanelDepth, error);
  }

  const double achieved = error / std::numbers::pi + tail_bound;
  if (!std::isfinite(integral) || achieved > tol) {
    std::ostringstream os;
    os << "Imhof quadrature reached error " << achieved << " > tolerance " << tol;
    throw Error(ErrorKind::QuadratureFailure, os.str());
  }
  const double sf = 0.5 + integral / std::numbers::pi;
  return std::clamp(sf, 0.0, 1.0);
}

WaldWeight upsilon_hat(const MomentEstimates& estimates, const WaldGeometry& geometry) {
  if (!(estimates.t1 > 0.0) || !std::isfinite(estimates.t1)) {
    throw Error(ErrorKind::InvalidMoments, "Wald weight needs t1 > 0");
  }
  WaldWeight w;
  w.df = wald_df(geometry.p1, geometry.p2);
  w.used_g2 = !estimates.t2_truncated && estimates.t2 > 0.0;
  w.upsilon = geometry.proj1 / estimates.t1;
  if (w.used_g2) w.upsilon += geometry.proj2 / estimates.t2;
  w.upsilon = 0.5 * (w.upsilon + w.upsilon.transpose());
  return w;
}

}  // namespace separ
