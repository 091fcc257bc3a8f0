#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "superrad/fitting.hpp"

using namespace superrad;
using doctest::Approx;

namespace {

std::vector<DataPoint> power(double a, double e, const std::vector<double>& xs) {
  std::vector<DataPoint> out;
  for (double x : xs) out.push_back({x, a * std::pow(x, e)});
  return out;
}

}  // namespace

TEST_CASE("noiseless power laws are recovered exactly") {
  const auto pts = power(3.0, 2.0, log_grid(0.1, 10.0, 8));
  const PowerLawFit f = fit_power_law(pts, {0.1, 10.0});
  CHECK(f.exponent == Approx(2.0).epsilon(1e-12));
  CHECK(f.prefactor == Approx(3.0).epsilon(1e-12));
  CHECK(f.residual_rms < 1e-12);
  CHECK(f(2.0) == Approx(12.0).epsilon(1e-12));

  const auto wide = power(0.7, -1.37, log_grid(1e-3, 1e3, 5));
  const PowerLawFit g = fit_power_law(wide, {1e-3, 1e3});
  CHECK(g.exponent == Approx(-1.37).epsilon(1e-12));
  CHECK(g.residual_rms < 1e-12);
  CHECK(g.n_points == 31);
}

TEST_CASE("exponent is invariant under rescaling") {
  std::vector<DataPoint> pts;
  for (double x : log_grid(1.0, 100.0, 8)) pts.push_back({x, std::pow(x, 0.6) * (1.0 + 0.05 * std::sin(x))});
  const PowerLawFit a = fit_power_law(pts, {1.0, 100.0});
  std::vector<DataPoint> scaled;
  for (auto p : pts) scaled.push_back({7.0 * p.x, 0.01 * p.y});
  const PowerLawFit b = fit_power_law(scaled, {7.0, 700.0});
  CHECK(a.exponent == Approx(b.exponent).epsilon(1e-12));
  CHECK(a.residual_rms == Approx(b.residual_rms).epsilon(1e-9));
}

TEST_CASE("fit errors") {
  const auto few = power(1.0, 1.0, {1, 2, 3, 4});
  CHECK_THROWS_AS(fit_power_law(few, {0.0, 10.0}), std::invalid_argument);
  auto neg = power(1.0, 1.0, {1, 2, 3, 4, 5});
  neg[2].y = -1.0;
  CHECK_THROWS_AS(fit_power_law(neg, {0.0, 10.0}), std::invalid_argument);
}

TEST_CASE("log grid") {
  const auto g = log_grid(0.01, 256.0, 8);
  CHECK(g.front() == Approx(0.01));
  CHECK(g.back() == Approx(256.0));
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
  CHECK(log_grid(1.0, 10.0, 8).size() == 9);
}

TEST_CASE("collapse metric") {
  const auto xs = log_grid(0.1, 100.0, 8);
  std::map<int, std::vector<DataPoint>> same;
  for (int n : {50, 100, 200}) {
    std::vector<DataPoint> c;
    for (double x : xs) c.push_back({x, 2.0 / n * std::sqrt(x)});
    same[n] = c;
  }
  const CollapseResult r = collapse_metric(same, 1.0);
  CHECK(r.spread < 1e-12);
  CHECK(r.overlap.lo == Approx(0.1));
  CHECK(r.overlap.hi == Approx(100.0));

  const CollapseResult raw = collapse_metric(same, 1.0, false);
  CHECK(raw.spread + 1.0 == Approx(200.0 / 50.0).epsilon(1e-9));

  std::map<int, std::vector<DataPoint>> one{{10, same[50]}};
  CHECK_THROWS_AS(collapse_metric(one, 1.0), std::invalid_argument);
  std::map<int, std::vector<DataPoint>> apart{{10, power(1.0, 1.0, {1, 2, 3})},
                                              {20, power(1.0, 1.0, {10, 20, 30})}};
  CHECK_THROWS_AS(collapse_metric(apart, 1.0), std::invalid_argument);
}

TEST_CASE("power-law intersection") {
  PowerLawFit a;
  a.exponent = 1.0;
  a.prefactor = 1.0;
  PowerLawFit b;
  b.exponent = 0.5;
  b.prefactor = 2.0;
  CHECK(power_law_intersection(a, b) == Approx(4.0).epsilon(1e-12));
  CHECK_THROWS_AS(power_law_intersection(a, a), std::domain_error);
}
