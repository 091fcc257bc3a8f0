#include "superrad/dicke.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "superrad/parallel.hpp"

namespace superrad {
namespace {

// Below this |beta| the sinh ratio for Z is replaced by an explicit sum.
constexpr double kPartitionSumThreshold = 1e-4;
// Below this (N+1)|beta| the coth/csch differences for the cumulants cancel
// badly; the cumulants are then summed directly.
constexpr double kCumulantSumThreshold = 1.0;

struct Cumulants {
  double mean;
  double variance;
};

Cumulants cumulants_by_summation(double beta, int n_atoms) {
  // only used for (N+1)|beta| < 1, so the weights stay O(1)
  const double j = 0.5 * n_atoms;
  CompensatedSum z, first;
  for (int k = 0; k <= n_atoms; ++k) {
    const double m = k - j;
    z.add(std::exp(-beta * m));
    // sum of m vanishes, so summing m (e^{-beta m} - 1) avoids the cancellation
    first.add(m * std::expm1(-beta * m));
  }
  const double mean = first.value() / z.value();
  CompensatedSum second;
  for (int k = 0; k <= n_atoms; ++k) {
    const double m = k - j;
    const double d = m - mean;
    second.add(std::exp(-beta * m) * d * d);
  }
  return {mean, second.value() / z.value()};
}

double coth(double x) { return 1.0 / std::tanh(x); }

double csch_squared(double x) {
  const double s = std::sinh(x);
  return 1.0 / (s * s);
}

}  // namespace

void ModelParams::validate() const {
  if (n_atoms < 1 || n_atoms > kMaxAtoms) {
    throw std::invalid_argument("n_atoms must lie in [1, " + std::to_string(kMaxAtoms) +
                                "], got " + std::to_string(n_atoms));
  }
  if (!std::isfinite(gamma) || gamma <= 0.0) {
    throw std::invalid_argument("gamma must be finite and > 0");
  }
  if (!std::isfinite(pump) || pump < 0.0) {
    throw std::invalid_argument("pump must be finite and >= 0");
  }
}

double ModelParams::beta() const {
  validate();
  if (pump == 0.0) throw std::domain_error("beta is infinite at zero pump");
  return -std::log(pump / gamma);
}

DickeIndex DickeIndex::from_inversion(double m, int n_atoms) {
  const double k = m + 0.5 * n_atoms;
  const double rounded = std::round(k);
  if (std::abs(k - rounded) > 1e-9 || rounded < 0 || rounded > n_atoms) {
    throw std::invalid_argument("m = " + std::to_string(m) + " is not a Dicke level for N = " +
                                std::to_string(n_atoms));
  }
  return DickeIndex{static_cast<int>(rounded)};
}

PopulationState::PopulationState(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.size() < 2) throw std::invalid_argument("population needs at least two levels");
  CompensatedSum s;
  for (double p : probs_) {
    if (!std::isfinite(p) || p < -kNegativeTolerance) {
      throw std::invalid_argument("population entry negative or non-finite");
    }
    s.add(p);
  }
  if (std::abs(s.value() - 1.0) > kNormTolerance) {
    throw std::invalid_argument("population not normalized: sum = " + std::to_string(s.value()));
  }
}

PopulationState PopulationState::ground(int n_atoms) {
  std::vector<double> p(static_cast<std::size_t>(n_atoms) + 1, 0.0);
  p.front() = 1.0;
  return PopulationState(std::move(p));
}

PopulationState PopulationState::fully_excited(int n_atoms) {
  std::vector<double> p(static_cast<std::size_t>(n_atoms) + 1, 0.0);
  p.back() = 1.0;
  return PopulationState(std::move(p));
}

double PopulationState::total() const {
  CompensatedSum s;
  for (std::size_t k = 0; k < probs_.size(); ++k) s.add((*this)[k]);
  return s.value();
}

double PopulationState::mean_inversion() const {
  CompensatedSum s;
  for (std::size_t k = 0; k < probs_.size(); ++k) s.add((*this)[k] * inversion_at(k, n_atoms()));
  return s.value();
}

LadderRates ladder_rates(const ModelParams& p) {
  p.validate();
  const auto n = static_cast<std::size_t>(p.n_atoms);
  LadderRates r;
  r.up.resize(n);
  r.down.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    // (j - m)(j + m + 1) at m = i - j equals (j + m')(j - m' + 1) at m' = m + 1
    const double c = static_cast<double>(i + 1) * static_cast<double>(n - i);
    r.up[i] = p.pump * c;
    r.down[i] = p.gamma * c;
  }
  return r;
}

PopulationState steady_state(const ModelParams& p) {
  p.validate();
  if (p.pump == 0.0) return PopulationState::ground(p.n_atoms);
  const double beta = p.beta();
  const double j = p.spin();
  const double m_star = beta > 0.0 ? -j : (beta < 0.0 ? j : 0.0);
  std::vector<double> probs(p.levels());
  CompensatedSum z;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    probs[k] = std::exp(-beta * (inversion_at(k, p.n_atoms) - m_star));
    z.add(probs[k]);
  }
  const double norm = z.value();
  for (double& x : probs) x /= norm;
  return PopulationState(std::move(probs));
}

double partition_function(double beta, int n_atoms) {
  if (n_atoms < 1) throw std::invalid_argument("n_atoms must be >= 1");
  if (std::abs(beta) > kPartitionSumThreshold) {
    return std::sinh(0.5 * (n_atoms + 1) * beta) / std::sinh(0.5 * beta);
  }
  CompensatedSum z;
  const double j = 0.5 * n_atoms;
  for (int k = 0; k <= n_atoms; ++k) z.add(std::exp(-beta * (k - j)));
  return z.value();
}

double log_partition_function(double beta, int n_atoms) {
  if (n_atoms < 1) throw std::invalid_argument("n_atoms must be >= 1");
  if (std::abs(beta) <= kPartitionSumThreshold) {
    return std::log(partition_function(beta, n_atoms));
  }
  const double a = std::abs(beta);
  return 0.5 * a * n_atoms + std::log(-std::expm1(-a * (n_atoms + 1))) - std::log(-std::expm1(-a));
}

double mean_inversion_at_beta(double beta, int n_atoms) {
  if (n_atoms < 1) throw std::invalid_argument("n_atoms must be >= 1");
  const double np1 = n_atoms + 1.0;
  if (np1 * std::abs(beta) < kCumulantSumThreshold) return cumulants_by_summation(beta, n_atoms).mean;
  return 0.5 * coth(0.5 * beta) - 0.5 * np1 * coth(0.5 * np1 * beta);
}

double inversion_variance_at_beta(double beta, int n_atoms) {
  if (n_atoms < 1) throw std::invalid_argument("n_atoms must be >= 1");
  const double np1 = n_atoms + 1.0;
  if (np1 * std::abs(beta) < kCumulantSumThreshold) {
    return cumulants_by_summation(beta, n_atoms).variance;
  }
  return 0.25 * csch_squared(0.5 * beta) - 0.25 * np1 * np1 * csch_squared(0.5 * np1 * beta);
}

double mean_inversion(const ModelParams& p) { return mean_inversion_at_beta(p.beta(), p.n_atoms); }

double inversion_variance(const ModelParams& p) {
  return inversion_variance_at_beta(p.beta(), p.n_atoms);
}

double mean_inversion_asymptotic(const ModelParams& p) {
  p.validate();
  if (p.pump == 0.0) throw std::domain_error("asymptotic inversion needs pump > 0");
  const double n = p.n_atoms;
  const double x = p.pump / p.gamma - 1.0;
  const double nx = n * x;
  if (std::abs(nx) < 1e-2) {
    // series of N/2 coth(Nx/2) - 1/x about x = 0
    const double x2 = x * x;
    return n * n * x / 12.0 - std::pow(n, 4) * x * x2 / 720.0 +
           std::pow(n, 6) * x * x2 * x2 / (945.0 * 32.0);
  }
  return 0.5 * n / std::tanh(0.5 * nx) - 1.0 / x;
}

}  // namespace superrad
