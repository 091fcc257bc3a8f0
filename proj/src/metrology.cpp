#include "superrad/metrology.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "superrad/errors.hpp"
#include "superrad/parallel.hpp"

namespace superrad {
namespace {

// Classical Fisher information of the Boltzmann family with respect to
// beta, summed over the distribution rather than taken from the closed form.
double fisher_by_enumeration(const PopulationState& s) {
  const int n = s.n_atoms();
  const double mean = s.mean_inversion();
  CompensatedSum acc;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double d = inversion_at(k, n) - mean;
    acc.add(s[k] * d * d);
  }
  return acc.value();
}

}  // namespace

SensitivityReport steady_sensitivity(const ModelParams& p) {
  p.validate();
  if (!(p.pump > 0.0)) throw std::domain_error("steady_sensitivity needs pump > 0");
  SensitivityReport r;
  r.variance = inversion_variance(p);
  r.d_mean_d_beta = -r.variance;
  r.delta_beta = std::sqrt(r.variance) / std::abs(r.d_mean_d_beta);
  // |d beta / d w| = 1 / w
  r.delta_w_single = p.pump * r.delta_beta;
  r.fisher_beta = fisher_by_enumeration(steady_state(p));
  r.cramer_rao_beta = 1.0 / std::sqrt(r.fisher_beta);
  r.saturation_ratio = r.delta_beta / r.cramer_rao_beta;
  return r;
}

ProtocolBudget total_sensitivity(const ModelParams& p, ProtocolBudget b) {
  p.validate();
  if (!(b.total_time_T > 0.0)) throw std::invalid_argument("T must be > 0");
  if (!(b.scan_constant_C > 1.0)) throw std::invalid_argument("C must be > 1");
  if (!(b.rate_r > 0.0)) throw std::invalid_argument("r must be > 0");
  if (!std::isfinite(b.eta)) throw std::invalid_argument("eta must be finite");

  const double dw = steady_sensitivity(p).delta_w_single;
  const double x = b.rate_r / p.gamma;
  b.sweep_speed = 2.0 * p.gamma * b.rate_r / p.n_atoms;
  b.widening = std::max(1.0, std::pow(x, b.eta));
  b.delta_w_scan = b.scan_constant_C * dw * b.widening;
  b.n_scans = b.sweep_speed * b.total_time_T / (2.0 * b.delta_w_scan);
  if (b.n_scans < 1.0) {
    throw InfeasibleBudget("only " + std::to_string(b.n_scans) +
                           " scans fit in T; increase T or r");
  }
  b.delta_w_total = dw * b.widening / std::sqrt(b.n_scans);

  // both asymptotes, each with the scan count implied by its own widening
  auto branch = [&](double widen) {
    const double scans = b.sweep_speed * b.total_time_T / (2.0 * b.scan_constant_C * dw * widen);
    return dw * widen / std::sqrt(scans);
  };
  b.delta_w_total_slow = branch(1.0);
  b.delta_w_total_fast = branch(std::pow(x, b.eta));
  b.crossover_rate = p.gamma;
  return b;
}

}  // namespace superrad
