#pragma once

// Population dynamics of the collective model: fixed-pump relaxation,
// linear pump sweeps and hysteresis loops, the J_z autocorrelation via the
// regression theorem, and the cumulant estimate of the relaxation rate.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "superrad/dicke.hpp"
#include "superrad/integrators.hpp"

namespace superrad {

/// Evolves a population under the fixed-pump generator for t_final.
/// Throws NumericalError on step-size underflow.
PopulationState evolve(const ModelParams& p, const PopulationState& initial, double t_final,
                       const IntegratorOptions& options = {});

/// Same generator applied to an arbitrary (not necessarily normalized)
/// coefficient vector over the ladder.
Eigen::VectorXd propagate(const ModelParams& p, const Eigen::VectorXd& v, double t,
                          const IntegratorOptions& options = {});

enum class SweepDirection { Up, Down };

const char* to_string(SweepDirection d);

struct SweepProtocol {
  double rate_r = 1.0;  ///< dimensionless scan rate: |dw/dt| = 2 gamma r / N
  double w_start = 0.0;
  double w_end = 0.0;
  SweepDirection direction = SweepDirection::Up;
  IntegratorOptions integrator{};
  int n_samples = 2001;  ///< uniform in w, endpoints included

  void validate() const;
};

/// Lowest pump value the default range policy will start or end a sweep at,
/// in units of gamma.
inline constexpr double kMinSweepPump = 1e-2;

/// Default range: gamma -/+ (2 gamma/N) max(10, 5 sqrt(max(r/gamma, 1))) * range_scale,
/// lower end clipped to kMinSweepPump * gamma.
SweepProtocol default_sweep_protocol(const ModelParams& base, double rate_r,
                                     SweepDirection direction, double range_scale = 1.0);

struct SweepSample {
  double t = 0.0;
  double w = 0.0;
  double inversion = 0.0;
};

struct SweepResult {
  SweepDirection direction = SweepDirection::Up;
  std::vector<SweepSample> samples;
  double max_norm_drift = 0.0;  ///< max |sum p - 1| over the samples
  IntegratorStats stats{};
};

/// Integrates dp/dt = L(w(t)) p along the linear ramp of the protocol,
/// starting from the exact steady state at w_start.
SweepResult sweep(const ModelParams& base, const SweepProtocol& protocol);

/// Pump value where <J_z> first crosses zero in the sweep direction, by
/// linear interpolation between the bracketing samples.
std::optional<double> zero_crossing(const SweepResult& result);

struct HysteresisLoop {
  SweepResult up;
  SweepResult down;
  double w_plus = 0.0;   ///< zero crossing of the up sweep
  double w_minus = 0.0;  ///< zero crossing of the down sweep
  double width = 0.0;    ///< |w_plus - w_minus|
  double range_scale = 1.0;

  /// (N / 2 gamma) * width
  double scaled_width(const ModelParams& base) const {
    return 0.5 * base.n_atoms / base.gamma * width;
  }
};

/// Paired up/down sweeps with the default range policy. A missing crossing
/// widens the range four-fold once; a second miss throws NumericalError.
HysteresisLoop hysteresis_width(const ModelParams& base, double rate_r,
                                const IntegratorOptions& options = {}, int n_samples = 2001);

struct HysteresisPoint {
  int n_atoms = 0;
  double rate_r = 0.0;
  std::optional<HysteresisLoop> loop;
  std::string error;  ///< non-empty when the point failed
};

/// Hysteresis widths over the (N, r) grid, OpenMP over grid points. Output
/// order is ns-major, then rates, independent of completion order. Failures
/// are recorded per point. Traces are dropped unless keep_traces.
std::vector<HysteresisPoint> hysteresis_scan(double gamma, std::span<const int> ns,
                                             std::span<const double> rates,
                                             const IntegratorOptions& options = {},
                                             bool keep_traces = false, int n_samples = 2001);
/// Serial reference for hysteresis_scan.
std::vector<HysteresisPoint> hysteresis_scan_serial(double gamma, std::span<const int> ns,
                                                    std::span<const double> rates,
                                                    const IntegratorOptions& options = {},
                                                    bool keep_traces = false,
                                                    int n_samples = 2001);

struct CorrelationSeries {
  std::vector<double> taus;
  std::vector<double> values;
  double fitted_rate = 0.0;
  double window_start = 0.0;  ///< tau where C_zz first drops to 1e-1 C_zz(0)
  double window_end = 0.0;    ///< tau where C_zz first drops to 1e-3 C_zz(0)
};

/// C_zz(tau) = <J_z(tau) J_z(0)> - <J_z>^2 in the steady state, from the
/// deviation vector (m - <J_z>) p_m evolved under the population generator.
/// The rate is the least-squares log-slope over the [1e-1, 1e-3] window.
/// Throws NumericalError when that window does not form within tau_max or
/// holds fewer than three samples.
CorrelationSeries correlation_zz(const ModelParams& p, double tau_max, int n_samples,
                                 const IntegratorOptions& options = {});

/// lambda(w) = w + gamma + 2 (w - gamma) <J_z>, with the large-N <J_z>.
double relaxation_rate_cumulant(const ModelParams& p);

struct AdiabaticBoundaries {
  double w_minus = 0.0;
  double w_plus = 0.0;
  double width() const { return w_plus - w_minus; }
};

/// Solves (dw/dt) / |w - gamma| = lambda(w) on both sides of w = gamma with
/// dw/dt = 2 gamma r / N. Throws NumericalError when no bracket exists.
AdiabaticBoundaries adiabatic_boundaries(const ModelParams& base, double rate_r);

}  // namespace superrad
