#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "rel.hpp"
#include "oracle.hpp"
#include "superrad/errors.hpp"
#include "superrad/fitting.hpp"
#include "superrad/metrology.hpp"

using namespace superrad;
using doctest::Approx;

namespace {

// Fisher information of beta by direct summation of the Boltzmann
// distribution: sum p (d ln p / d beta)^2 with d ln p / d beta = <m> - m.
double fisher_reference(double beta, int n) {
  const auto mo = oracle::boltzmann(beta, n);
  const long double j = 0.5L * n;
  long double z = 0, acc = 0;
  std::vector<long double> w(n + 1);
  for (int k = 0; k <= n; ++k) {
    w[k] = std::exp(-static_cast<long double>(beta) * (k - j) - std::fabs(static_cast<long double>(beta)) * j);
    z += w[k];
  }
  for (int k = 0; k <= n; ++k) {
    const long double score = mo.mean - (k - j);
    acc += w[k] / z * score * score;
  }
  return static_cast<double>(acc);
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<DataPoint> pts;
  for (std::size_t i = 0; i < x.size(); ++i) pts.push_back({x[i], y[i]});
  return fit_power_law(pts, {x.front(), x.back()}).exponent;
}

}  // namespace

TEST_CASE("critical sensitivity examples") {
  const SensitivityReport r = steady_sensitivity({100, 1.0, 1.0});
  CHECK(r.delta_w_single == Approx(1.0 / std::sqrt(850.0)).epsilon(1e-12));
  CHECK(r.delta_w_single == Approx(0.03429).epsilon(1e-3));
  CHECK(r.delta_w_single * 100 == rel(std::sqrt(12.0), 0.01));
  CHECK(r.d_mean_d_beta == Approx(-850.0).epsilon(1e-12));

  const SensitivityReport one = steady_sensitivity({1, 1.0, 1.0});
  CHECK(one.variance == Approx(0.25).epsilon(1e-14));
  CHECK(one.delta_beta == Approx(2.0).epsilon(1e-14));

  CHECK_THROWS_AS(steady_sensitivity({10, 1.0, 0.0}), std::domain_error);
}

TEST_CASE("Fisher information matches an independent sum and the bound is saturated") {
  for (int n : {1, 2, 10, 50, 100, 250, 500}) {
    for (double w = 0.8; w <= 1.2 + 1e-12; w += 0.05) {
      const ModelParams p{n, 1.0, w};
      const SensitivityReport r = steady_sensitivity(p);
      CHECK(r.fisher_beta == Approx(fisher_reference(p.beta(), n)).epsilon(1e-10));
      CHECK(std::abs(r.saturation_ratio - 1.0) <= 1e-12);
      CHECK(r.saturation_ratio >= 1.0 - 1e-9);
    }
  }
}

TEST_CASE("single-shot sensitivity scales as 1/N") {
  for (int n : {50, 100, 200, 400}) {
    const double a = steady_sensitivity({n, 1.0, 1.0}).delta_w_single;
    const double b = steady_sensitivity({2 * n, 1.0, 1.0}).delta_w_single;
    CHECK(a / b == rel(2.0, 0.02));
  }
}

TEST_CASE("budget asymptotes and T scaling") {
  const ModelParams p{100, 1.0, 1.0};
  ProtocolBudget b;
  b.total_time_T = 1e6;
  b.scan_constant_C = 2.0;
  b.eta = 0.6;

  auto total = [&](double r) {
    ProtocolBudget c = b;
    c.rate_r = r;
    return total_sensitivity(p, c).delta_w_total;
  };
  const std::vector<double> slow = log_grid(1e-3, 1e-1, 8);
  const std::vector<double> fast = log_grid(10.0, 1e3, 8);
  std::vector<double> ys, yf;
  for (double r : slow) ys.push_back(total(r));
  for (double r : fast) yf.push_back(total(r));
  CHECK(slope(slow, ys) == rel(-0.5, 0.1));
  CHECK(slope(fast, yf) == rel(0.4, 0.125));

  ProtocolBudget c = b;
  c.rate_r = 0.3;
  const double base = total_sensitivity(p, c).delta_w_total;
  c.total_time_T *= 2.0;
  CHECK(base / total_sensitivity(p, c).delta_w_total == Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("budget optimum sits near r = gamma for eta > 1/3") {
  const ModelParams p{100, 1.0, 1.0};
  for (double eta : {0.4, 0.6, 0.8}) {
    ProtocolBudget b;
    b.total_time_T = 1e6;
    b.scan_constant_C = 2.0;
    b.eta = eta;
    double best = INFINITY, best_r = 0.0;
    for (double r : log_grid(1e-3, 1e3, 16)) {
      b.rate_r = r;
      const double v = total_sensitivity(p, b).delta_w_total;
      if (v < best) {
        best = v;
        best_r = r;
      }
    }
    CHECK(best_r > 0.5);
    CHECK(best_r < 2.0);
    b.rate_r = 1.0;
    CHECK(total_sensitivity(p, b).crossover_rate == Approx(1.0));
  }
}

TEST_CASE("budget validation and infeasibility") {
  const ModelParams p{100, 1.0, 1.0};
  ProtocolBudget b;
  b.total_time_T = 10.0;
  b.scan_constant_C = 2.0;
  b.rate_r = 1.0;
  CHECK_NOTHROW(total_sensitivity(p, b));
  ProtocolBudget bad = b;
  bad.total_time_T = 0.0;
  CHECK_THROWS_AS(total_sensitivity(p, bad), std::invalid_argument);
  bad = b;
  bad.scan_constant_C = 1.0;
  CHECK_THROWS_AS(total_sensitivity(p, bad), std::invalid_argument);
  bad = b;
  bad.rate_r = 0.0;
  CHECK_THROWS_AS(total_sensitivity(p, bad), std::invalid_argument);
  bad = b;
  bad.total_time_T = 1e-3;
  CHECK_THROWS_AS(total_sensitivity(p, bad), InfeasibleBudget);
}
