#pragma once

#include <map>
#include <span>
#include <vector>

namespace superrad {

struct DataPoint {
  double x = 0.0;
  double y = 0.0;
};

struct FitWindow {
  double lo = 0.0;
  double hi = 0.0;
};

/// Headline regime windows in units of gamma for the hysteresis exponent.
inline constexpr FitWindow kSlowScanWindow{0.01, 0.3};
inline constexpr FitWindow kFastScanWindow{4.0, 256.0};
inline constexpr int kPointsPerDecade = 8;
/// Scan-rate range of the collapse comparison across atom numbers.
inline constexpr FitWindow kCollapseWindow{0.1, 100.0};

/// y = prefactor * x^exponent
struct PowerLawFit {
  double exponent = 0.0;
  double prefactor = 0.0;
  FitWindow window{};
  double residual_rms = 0.0;  ///< RMS of ln y - fitted ln y
  int n_points = 0;

  double operator()(double x) const;
};

inline constexpr int kMinFitPoints = 5;

/// OLS on (ln x, ln y) over the points with x inside the closed window.
/// Throws std::invalid_argument for fewer than kMinFitPoints points in the
/// window or any non-positive coordinate among them.
PowerLawFit fit_power_law(std::span<const DataPoint> points, FitWindow window);

/// Logarithmic grid from lo to hi inclusive with `per_decade` intervals per decade.
std::vector<double> log_grid(double lo, double hi, int per_decade = kPointsPerDecade);

struct CollapseResult {
  double spread = 0.0;  ///< max over the grid of (max - min) / min across curves
  double worst_x = 0.0;
  FitWindow overlap{};
};

/// Collapse test for width curves keyed by atom number. With `rescale`,
/// each y is multiplied by N / (2 gamma) first. Curves are interpolated
/// linearly in (ln x, ln y) onto a shared logarithmic grid over the common
/// x range. Throws std::invalid_argument with fewer than two curves or no
/// overlapping range.
CollapseResult collapse_metric(const std::map<int, std::vector<DataPoint>>& curves, double gamma,
                               bool rescale = true, int grid_points = 97);

/// Abscissa where two power laws intersect. Throws std::domain_error for
/// equal exponents.
double power_law_intersection(const PowerLawFit& a, const PowerLawFit& b);

}  // namespace superrad
