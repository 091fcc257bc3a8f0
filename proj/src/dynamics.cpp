#include "superrad/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <boost/math/tools/roots.hpp>

#include "superrad/errors.hpp"
#include "superrad/parallel.hpp"
#include "superrad/rate_generator.hpp"

namespace superrad {
namespace {

Eigen::VectorXd to_vector(const PopulationState& s) {
  const auto raw = s.raw();
  return Eigen::Map<const Eigen::VectorXd>(raw.data(), static_cast<Eigen::Index>(raw.size()));
}

double inversion_of(const Eigen::VectorXd& y, int n_atoms) {
  CompensatedSum s;
  for (Eigen::Index k = 0; k < y.size(); ++k) {
    s.add(std::max(y[k], 0.0) * inversion_at(static_cast<std::size_t>(k), n_atoms));
  }
  return s.value();
}

double norm_drift(const Eigen::VectorXd& y) {
  CompensatedSum s;
  for (Eigen::Index k = 0; k < y.size(); ++k) s.add(y[k]);
  return std::abs(s.value() - 1.0);
}

// Integrator undershoot within a few absolute tolerances is zeroed; anything
// larger means the run is not trustworthy.
PopulationState to_population(Eigen::VectorXd y, double abs_tol) {
  const double floor = -std::max(10.0 * abs_tol, PopulationState::kNegativeTolerance);
  for (Eigen::Index k = 0; k < y.size(); ++k) {
    if (y[k] < floor) {
      throw NumericalError("population entry " + std::to_string(k) + " = " + std::to_string(y[k]) +
                           " below integrator tolerance");
    }
    if (y[k] < 0.0) y[k] = 0.0;
  }
  return PopulationState(std::vector<double>(y.data(), y.data() + y.size()));
}

}  // namespace

PopulationState evolve(const ModelParams& p, const PopulationState& initial, double t_final,
                       const IntegratorOptions& options) {
  p.validate();
  if (initial.n_atoms() != p.n_atoms) throw std::invalid_argument("evolve: size mismatch");
  if (!(t_final >= 0.0)) throw std::invalid_argument("evolve: t_final must be >= 0");
  Eigen::VectorXd y = propagate(p, to_vector(initial), t_final, options);
  return to_population(std::move(y), options.abs_tol);
}

Eigen::VectorXd propagate(const ModelParams& p, const Eigen::VectorXd& v, double t,
                          const IntegratorOptions& options) {
  p.validate();
  if (v.size() != static_cast<Eigen::Index>(p.levels())) {
    throw std::invalid_argument("propagate: vector length must be N+1");
  }
  RateGenerator generator(p.n_atoms, p.gamma);
  RampedRateSystem system(generator, PumpRamp{p.pump, 0.0});
  AdaptiveIntegrator<RampedRateSystem, Eigen::VectorXd> integrator(system, options);
  Eigen::VectorXd y = v;
  integrator.advance(y, 0.0, t);
  return y;
}

const char* to_string(SweepDirection d) { return d == SweepDirection::Up ? "up" : "down"; }

void SweepProtocol::validate() const {
  if (!(rate_r > 0.0) || !std::isfinite(rate_r)) throw std::invalid_argument("rate_r must be > 0");
  if (!(w_start > 0.0) || !(w_end > 0.0)) throw std::invalid_argument("sweep endpoints must be > 0");
  const bool up = w_end > w_start;
  if (w_end == w_start || up != (direction == SweepDirection::Up)) {
    throw std::invalid_argument("sweep endpoints inconsistent with direction");
  }
  if (n_samples < 2) throw std::invalid_argument("sweep needs at least two samples");
}

SweepProtocol default_sweep_protocol(const ModelParams& base, double rate_r,
                                     SweepDirection direction, double range_scale) {
  base.validate();
  const double g = base.gamma;
  const double half = range_scale * (2.0 * g / base.n_atoms) *
                      std::max(10.0, 5.0 * std::sqrt(std::max(rate_r / g, 1.0)));
  const double lo = std::max(g - half, kMinSweepPump * g);
  const double hi = g + half;
  SweepProtocol proto;
  proto.rate_r = rate_r;
  proto.direction = direction;
  proto.w_start = direction == SweepDirection::Up ? lo : hi;
  proto.w_end = direction == SweepDirection::Up ? hi : lo;
  return proto;
}

SweepResult sweep(const ModelParams& base, const SweepProtocol& protocol) {
  base.validate();
  protocol.validate();
  const double speed = 2.0 * base.gamma * protocol.rate_r / base.n_atoms;
  const double sign = protocol.direction == SweepDirection::Up ? 1.0 : -1.0;
  const double duration = std::abs(protocol.w_end - protocol.w_start) / speed;

  RateGenerator generator(base.n_atoms, base.gamma);
  RampedRateSystem system(generator, PumpRamp{protocol.w_start, sign * speed});
  AdaptiveIntegrator<RampedRateSystem, Eigen::VectorXd> integrator(system, protocol.integrator);

  Eigen::VectorXd y = to_vector(steady_state(base.with_pump(protocol.w_start)));
  SweepResult result;
  result.direction = protocol.direction;
  result.samples.reserve(static_cast<std::size_t>(protocol.n_samples));
  double t_prev = 0.0;
  for (int i = 0; i < protocol.n_samples; ++i) {
    const double t = duration * i / (protocol.n_samples - 1);
    integrator.advance(y, t_prev, t);
    t_prev = t;
    const double w = i + 1 == protocol.n_samples ? protocol.w_end : system.ramp().at(t);
    result.samples.push_back({t, w, inversion_of(y, base.n_atoms)});
    result.max_norm_drift = std::max(result.max_norm_drift, norm_drift(y));
  }
  result.stats = integrator.stats();
  return result;
}

std::optional<double> zero_crossing(const SweepResult& result) {
  const auto& s = result.samples;
  const bool up = result.direction == SweepDirection::Up;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    const double a = s[i].inversion;
    const double b = s[i + 1].inversion;
    const bool crosses = up ? (a < 0.0 && b >= 0.0) : (a > 0.0 && b <= 0.0);
    if (crosses) return s[i].w + (s[i + 1].w - s[i].w) * (a / (a - b));
  }
  return std::nullopt;
}

HysteresisLoop hysteresis_width(const ModelParams& base, double rate_r,
                                const IntegratorOptions& options, int n_samples) {
  base.validate();
  if (!(rate_r > 0.0)) throw std::invalid_argument("rate_r must be > 0");
  for (const double scale : {1.0, 4.0}) {
    HysteresisLoop loop;
    loop.range_scale = scale;
    SweepProtocol up = default_sweep_protocol(base, rate_r, SweepDirection::Up, scale);
    SweepProtocol down = default_sweep_protocol(base, rate_r, SweepDirection::Down, scale);
    up.integrator = down.integrator = options;
    up.n_samples = down.n_samples = n_samples;
    loop.up = sweep(base, up);
    loop.down = sweep(base, down);
    const auto plus = zero_crossing(loop.up);
    const auto minus = zero_crossing(loop.down);
    if (plus && minus) {
      loop.w_plus = *plus;
      loop.w_minus = *minus;
      loop.width = std::abs(*plus - *minus);
      return loop;
    }
  }
  throw NumericalError("no <J_z> = 0 crossing for N = " + std::to_string(base.n_atoms) +
                       ", r = " + std::to_string(rate_r) + " even after widening the range");
}

namespace {

HysteresisPoint scan_point(double gamma, int n, double r, const IntegratorOptions& options,
                           bool keep_traces, int n_samples) {
  HysteresisPoint point;
  point.n_atoms = n;
  point.rate_r = r;
  try {
    ModelParams base{n, gamma, gamma};
    HysteresisLoop loop = hysteresis_width(base, r, options, n_samples);
    if (!keep_traces) {
      loop.up.samples.clear();
      loop.up.samples.shrink_to_fit();
      loop.down.samples.clear();
      loop.down.samples.shrink_to_fit();
    }
    point.loop = std::move(loop);
  } catch (const std::exception& e) {
    point.error = e.what();
  }
  return point;
}

}  // namespace

std::vector<HysteresisPoint> hysteresis_scan(double gamma, std::span<const int> ns,
                                             std::span<const double> rates,
                                             const IntegratorOptions& options, bool keep_traces,
                                             int n_samples) {
  const std::size_t total = ns.size() * rates.size();
  std::vector<HysteresisPoint> out(total);
  const auto count = static_cast<std::ptrdiff_t>(total);
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count())
  for (std::ptrdiff_t idx = 0; idx < count; ++idx) {
    const auto i = static_cast<std::size_t>(idx);
    out[i] = scan_point(gamma, ns[i / rates.size()], rates[i % rates.size()], options, keep_traces,
                        n_samples);
  }
  return out;
}

std::vector<HysteresisPoint> hysteresis_scan_serial(double gamma, std::span<const int> ns,
                                                    std::span<const double> rates,
                                                    const IntegratorOptions& options,
                                                    bool keep_traces, int n_samples) {
  std::vector<HysteresisPoint> out;
  out.reserve(ns.size() * rates.size());
  for (int n : ns) {
    for (double r : rates) out.push_back(scan_point(gamma, n, r, options, keep_traces, n_samples));
  }
  return out;
}

CorrelationSeries correlation_zz(const ModelParams& p, double tau_max, int n_samples,
                                 const IntegratorOptions& options) {
  p.validate();
  if (p.pump <= 0.0) throw std::invalid_argument("correlation_zz needs pump > 0");
  if (!(tau_max > 0.0) || n_samples < 3) {
    throw std::invalid_argument("correlation_zz needs tau_max > 0 and n_samples >= 3");
  }
  const PopulationState ss = steady_state(p);
  const double mean = ss.mean_inversion();
  const auto levels = static_cast<Eigen::Index>(p.levels());
  Eigen::VectorXd m(levels);
  Eigen::VectorXd v(levels);
  for (Eigen::Index k = 0; k < levels; ++k) {
    m[k] = inversion_at(static_cast<std::size_t>(k), p.n_atoms);
    v[k] = (m[k] - mean) * ss[static_cast<std::size_t>(k)];
  }

  RateGenerator generator(p.n_atoms, p.gamma);
  RampedRateSystem system(generator, PumpRamp{p.pump, 0.0});
  AdaptiveIntegrator<RampedRateSystem, Eigen::VectorXd> integrator(system, options);

  CorrelationSeries out;
  out.taus.reserve(static_cast<std::size_t>(n_samples));
  out.values.reserve(static_cast<std::size_t>(n_samples));
  double t_prev = 0.0;
  for (int i = 0; i < n_samples; ++i) {
    const double tau = tau_max * i / (n_samples - 1);
    integrator.advance(v, t_prev, tau);
    t_prev = tau;
    out.taus.push_back(tau);
    out.values.push_back(m.dot(v));
  }

  const double c0 = out.values.front();
  std::size_t first = out.values.size();
  std::size_t last = out.values.size();
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    if (first == out.values.size() && out.values[i] <= 1e-1 * c0) first = i;
    if (out.values[i] <= 1e-3 * c0) {
      last = i;
      break;
    }
  }
  if (last == out.values.size()) {
    throw NumericalError("C_zz did not decay to 1e-3 of C_zz(0) within tau_max");
  }
  if (last < first + 2) {
    throw NumericalError("C_zz tail fell below the fit floor before a fit window formed; "
                         "increase n_samples");
  }
  // least squares on ln C over [first, last]
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  const double count = static_cast<double>(last - first + 1);
  for (std::size_t i = first; i <= last; ++i) {
    if (!(out.values[i] > 0.0)) throw NumericalError("C_zz non-positive inside the fit window");
    const double t = out.taus[i];
    const double y = std::log(out.values[i]);
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
  }
  const double slope = (count * sty - st * sy) / (count * stt - st * st);
  out.fitted_rate = -slope;
  out.window_start = out.taus[first];
  out.window_end = out.taus[last];
  return out;
}

double relaxation_rate_cumulant(const ModelParams& p) {
  p.validate();
  return p.pump + p.gamma + 2.0 * (p.pump - p.gamma) * mean_inversion_asymptotic(p);
}

AdiabaticBoundaries adiabatic_boundaries(const ModelParams& base, double rate_r) {
  base.validate();
  if (!(rate_r > 0.0) || !std::isfinite(rate_r)) {
    throw NumericalError("adiabatic_boundaries: no root bracket for r <= 0");
  }
  const double g = base.gamma;
  const double speed = 2.0 * g * rate_r / base.n_atoms;
  auto excess = [&](double w) {
    return relaxation_rate_cumulant(base.with_pump(w)) * std::abs(w - g) - speed;
  };
  auto solve = [&](double sign) {
    double step = std::max(speed / (4.0 * g), 1e-12 * g);
    double inner = g;
    for (int it = 0; it < 200; ++it) {
      double outer = g + sign * step;
      if (outer <= 0.0) {
        outer = 1e-300;
        if (excess(outer) <= 0.0) break;
      }
      if (excess(outer) > 0.0) {
        std::uintmax_t max_iter = 200;
        const auto [a, b] = boost::math::tools::toms748_solve(
            excess, std::min(inner, outer), std::max(inner, outer),
            boost::math::tools::eps_tolerance<double>(50), max_iter);
        return 0.5 * (a + b);
      }
      inner = outer;
      step *= 2.0;
    }
    throw NumericalError("adiabatic_boundaries: no root bracket on the " +
                         std::string(sign > 0 ? "upper" : "lower") + " side");
  };
  return {solve(-1.0), solve(+1.0)};
}

}  // namespace superrad
