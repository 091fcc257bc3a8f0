#pragma once

// Adaptive one-step integrators for linear, possibly time-dependent systems
// dy/dt = L(t) y.
//
// A System supplies
//   void apply(double t, const State& y, State& out) const;              // out = L(t) y
//   void solve_shifted(double t, double alpha, const State& rhs,
//                      State& out) const;                                // (1 - alpha L(t)) out = rhs
//   double stiffness_bound(double t) const;                              // >= spectral radius of L(t)
// and State is an Eigen dense vector or matrix type.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <string>

#include "superrad/errors.hpp"

namespace superrad {

enum class Stepper {
  /// L-stable 3-stage SDIRK (order 3), error from step doubling.
  Sdirk3,
  /// Explicit Dormand-Prince 5(4); step capped by stability_fraction / stiffness_bound.
  DormandPrince45,
};

struct IntegratorOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  Stepper stepper = Stepper::Sdirk3;
  /// Convergence check: tightens both tolerances so accepted steps shrink by
  /// about a factor two relative to the default run.
  bool halve_steps = false;
  double initial_step = 0.0;  ///< 0 picks 1% of the first requested interval
  double max_step = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 200'000'000;
  /// Explicit steps are capped at stability_fraction / stiffness_bound.
  double stability_fraction = 0.5;
};

struct IntegratorStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  double last_step = 0.0;
};

namespace detail {

// Alexander's L-stable, stiffly accurate SDIRK3.
inline constexpr double kSdirkDiag = 0.43586652150845899941601945;
inline constexpr double kSdirkC2 = 0.5 * (1.0 + kSdirkDiag);
inline constexpr double kSdirkA21 = kSdirkC2 - kSdirkDiag;
inline constexpr double kSdirkB1 =
    -0.25 * (6.0 * kSdirkDiag * kSdirkDiag - 16.0 * kSdirkDiag + 1.0);
inline constexpr double kSdirkB2 =
    0.25 * (6.0 * kSdirkDiag * kSdirkDiag - 20.0 * kSdirkDiag + 5.0);

template <class State>
double scaled_error(const State& err, const State& y0, const State& y1, double atol, double rtol) {
  const auto scale = (atol + rtol * y0.array().abs().max(y1.array().abs())).eval();
  return (err.array().abs() / scale).maxCoeff();
}

}  // namespace detail

template <class System, class State>
class AdaptiveIntegrator {
 public:
  AdaptiveIntegrator(const System& system, IntegratorOptions options)
      : system_(system), opt_(options) {
    if (opt_.halve_steps) {
      // local error ~ h^(p+1) with p = 3 (SDIRK) or 4 (DP45)
      const double shrink = opt_.stepper == Stepper::Sdirk3 ? 16.0 : 32.0;
      opt_.abs_tol /= shrink;
      opt_.rel_tol /= shrink;
    }
  }

  /// Integrates y from t0 to t1 in place. The step size carries over
  /// between calls, so sampling a trajectory costs little extra.
  void advance(State& y, double t0, double t1) {
    if (t1 <= t0) return;
    if (h_ <= 0.0) h_ = opt_.initial_step > 0.0 ? opt_.initial_step : 0.01 * (t1 - t0);
    double t = t0;
    State y_new;
    while (t < t1) {
      if (stats_.accepted + stats_.rejected >= opt_.max_steps) {
        throw NumericalError(describe("step budget exhausted", t));
      }
      double h = std::min({h_, opt_.max_step, stable_cap(t)});
      // absorb a round-off sliver rather than stepping into it
      const bool clipped = t + h >= t1 - 1e-9 * h;
      if (clipped) h = t1 - t;
      if (h < 1e-14 * std::max(1.0, std::abs(t))) {
        throw NumericalError(describe("step size underflow", t));
      }
      double err = attempt(y, t, h, y_new);
      if (!std::isfinite(err)) err = std::numeric_limits<double>::infinity();
      if (err <= 1.0) {
        y.swap(y_new);
        t = clipped ? t1 : t + h;
        ++stats_.accepted;
        stats_.last_step = h;
        // a clipped step says nothing about the natural step size
        if (!clipped) h_ = h * growth(err);
      } else {
        ++stats_.rejected;
        h_ = h * growth(err);
      }
    }
  }

  const IntegratorStats& stats() const { return stats_; }

 private:
  double growth(double err) const {
    if (err == 0.0) return 5.0;
    if (std::isinf(err)) return 0.2;
    const double order = opt_.stepper == Stepper::Sdirk3 ? 4.0 : 5.0;
    return std::clamp(0.9 * std::pow(err, -1.0 / order), 0.2, 5.0);
  }

  double stable_cap(double t) const {
    if (opt_.stepper != Stepper::DormandPrince45) return std::numeric_limits<double>::infinity();
    const double rho = system_.stiffness_bound(t);
    return rho > 0.0 ? opt_.stability_fraction / rho : std::numeric_limits<double>::infinity();
  }

  std::string describe(const char* what, double t) const {
    std::ostringstream os;
    os << what << " at t = " << t << " (accepted " << stats_.accepted << ", rejected "
       << stats_.rejected << ")";
    return os.str();
  }

  double attempt(const State& y, double t, double h, State& y_out) {
    if (opt_.stepper == Stepper::Sdirk3) {
      State full;
      sdirk_step(y, t, h, full);
      State half;
      sdirk_step(y, t, 0.5 * h, half);
      sdirk_step(half, t + 0.5 * h, 0.5 * h, y_out);
      const State err = (y_out - full) / 7.0;
      return detail::scaled_error(err, y, y_out, opt_.abs_tol, opt_.rel_tol);
    }
    return dopri_step(y, t, h, y_out);
  }

  void sdirk_step(const State& y, double t, double h, State& out) const {
    using namespace detail;
    const double gh = kSdirkDiag * h;
    State y1, y2;
    system_.solve_shifted(t + kSdirkDiag * h, gh, y, y1);
    const State k1 = (y1 - y) / gh;
    const State r2 = y + (h * kSdirkA21) * k1;
    system_.solve_shifted(t + kSdirkC2 * h, gh, r2, y2);
    const State k2 = (y2 - r2) / gh;
    const State r3 = y + (h * kSdirkB1) * k1 + (h * kSdirkB2) * k2;
    system_.solve_shifted(t + h, gh, r3, out);
  }

  double dopri_step(const State& y, double t, double h, State& out) const {
    State k1, k2, k3, k4, k5, k6, k7;
    system_.apply(t, y, k1);
    system_.apply(t + h / 5.0, State(y + h * (k1 / 5.0)), k2);
    system_.apply(t + 3.0 * h / 10.0, State(y + h * (3.0 / 40.0 * k1 + 9.0 / 40.0 * k2)), k3);
    system_.apply(t + 4.0 * h / 5.0,
                  State(y + h * (44.0 / 45.0 * k1 - 56.0 / 15.0 * k2 + 32.0 / 9.0 * k3)), k4);
    system_.apply(t + 8.0 * h / 9.0,
                  State(y + h * (19372.0 / 6561.0 * k1 - 25360.0 / 2187.0 * k2 +
                                 64448.0 / 6561.0 * k3 - 212.0 / 729.0 * k4)),
                  k5);
    system_.apply(t + h,
                  State(y + h * (9017.0 / 3168.0 * k1 - 355.0 / 33.0 * k2 + 46732.0 / 5247.0 * k3 +
                                 49.0 / 176.0 * k4 - 5103.0 / 18656.0 * k5)),
                  k6);
    out = y + h * (35.0 / 384.0 * k1 + 500.0 / 1113.0 * k3 + 125.0 / 192.0 * k4 -
                   2187.0 / 6784.0 * k5 + 11.0 / 84.0 * k6);
    system_.apply(t + h, out, k7);
    const State err =
        h * ((35.0 / 384.0 - 5179.0 / 57600.0) * k1 + (500.0 / 1113.0 - 7571.0 / 16695.0) * k3 +
             (125.0 / 192.0 - 393.0 / 640.0) * k4 + (-2187.0 / 6784.0 + 92097.0 / 339200.0) * k5 +
             (11.0 / 84.0 - 187.0 / 2100.0) * k6 - 1.0 / 40.0 * k7);
    return detail::scaled_error(err, y, out, opt_.abs_tol, opt_.rel_tol);
  }

  const System& system_;
  IntegratorOptions opt_;
  IntegratorStats stats_;
  double h_ = 0.0;
};

}  // namespace superrad
