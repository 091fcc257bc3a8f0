#include "superrad/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace superrad {

double PowerLawFit::operator()(double x) const { return prefactor * std::pow(x, exponent); }

PowerLawFit fit_power_law(std::span<const DataPoint> points, FitWindow window) {
  if (!(window.lo < window.hi)) throw std::invalid_argument("fit window must have lo < hi");
  std::vector<double> lx, ly;
  for (const auto& p : points) {
    if (p.x < window.lo || p.x > window.hi) continue;
    if (!(p.x > 0.0) || !(p.y > 0.0)) {
      throw std::invalid_argument("power-law fit needs positive data, got (" + std::to_string(p.x) +
                                  ", " + std::to_string(p.y) + ")");
    }
    lx.push_back(std::log(p.x));
    ly.push_back(std::log(p.y));
  }
  const auto n = static_cast<int>(lx.size());
  if (n < kMinFitPoints) {
    throw std::invalid_argument("power-law fit needs at least " + std::to_string(kMinFitPoints) +
                                " points in the window, got " + std::to_string(n));
  }
  // centred sums keep the regression well conditioned far from x = 1
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("power-law fit needs distinct x values");

  PowerLawFit fit;
  fit.exponent = sxy / sxx;
  const double intercept = my - fit.exponent * mx;
  fit.prefactor = std::exp(intercept);
  fit.window = window;
  fit.n_points = n;
  double ss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = ly[i] - (intercept + fit.exponent * lx[i]);
    ss += r * r;
  }
  fit.residual_rms = std::sqrt(ss / n);
  return fit;
}

std::vector<double> log_grid(double lo, double hi, int per_decade) {
  if (!(lo > 0.0) || !(hi > lo) || per_decade < 1) {
    throw std::invalid_argument("log_grid needs 0 < lo < hi and per_decade >= 1");
  }
  const int intervals =
      std::max(1, static_cast<int>(std::lround(per_decade * std::log10(hi / lo))));
  std::vector<double> g(static_cast<std::size_t>(intervals) + 1);
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i <= intervals; ++i) g[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / intervals);
  g.front() = lo;
  g.back() = hi;
  return g;
}

namespace {

double interp_loglog(const std::vector<DataPoint>& c, double x) {
  auto it = std::lower_bound(c.begin(), c.end(), x,
                             [](const DataPoint& p, double v) { return p.x < v; });
  if (it == c.end()) it = std::prev(c.end());
  if (it->x == x) return it->y;
  if (it == c.begin()) it = std::next(it);
  const auto& a = *std::prev(it);
  const auto& b = *it;
  const double t = (std::log(x) - std::log(a.x)) / (std::log(b.x) - std::log(a.x));
  return std::exp(std::log(a.y) + t * (std::log(b.y) - std::log(a.y)));
}

}  // namespace

CollapseResult collapse_metric(const std::map<int, std::vector<DataPoint>>& curves, double gamma,
                               bool rescale, int grid_points) {
  if (curves.size() < 2) throw std::invalid_argument("collapse needs at least two curves");
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
  if (grid_points < 2) throw std::invalid_argument("collapse grid needs at least two points");
  std::vector<std::vector<DataPoint>> prepared;
  double lo = 0.0, hi = std::numeric_limits<double>::infinity();
  for (const auto& [n, pts] : curves) {
    if (pts.size() < 2) throw std::invalid_argument("curve for N = " + std::to_string(n) + " has < 2 points");
    std::vector<DataPoint> c(pts);
    std::sort(c.begin(), c.end(), [](const DataPoint& a, const DataPoint& b) { return a.x < b.x; });
    for (auto& p : c) {
      if (!(p.x > 0.0) || !(p.y > 0.0)) throw std::invalid_argument("collapse needs positive data");
      if (rescale) p.y *= 0.5 * n / gamma;
    }
    lo = std::max(lo, c.front().x);
    hi = std::min(hi, c.back().x);
    prepared.push_back(std::move(c));
  }
  if (!(hi > lo)) throw std::invalid_argument("curves share no overlapping x range");

  CollapseResult out;
  out.overlap = {lo, hi};
  for (int i = 0; i < grid_points; ++i) {
    const double x = i + 1 == grid_points
                         ? hi
                         : std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (grid_points - 1));
    double ymin = std::numeric_limits<double>::infinity(), ymax = 0.0;
    for (const auto& c : prepared) {
      const double y = interp_loglog(c, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
    const double s = (ymax - ymin) / ymin;
    if (s > out.spread || i == 0) {
      out.spread = s;
      out.worst_x = x;
    }
  }
  return out;
}

double power_law_intersection(const PowerLawFit& a, const PowerLawFit& b) {
  if (a.exponent == b.exponent) throw std::domain_error("parallel power laws never intersect");
  return std::pow(b.prefactor / a.prefactor, 1.0 / (a.exponent - b.exponent));
}

}  // namespace superrad
