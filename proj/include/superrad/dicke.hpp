#pragma once

// Collective decay + collective pumping of N two-level atoms restricted to the
// symmetric Dicke ladder j = N/2.
//
// Index convention (used everywhere in this library): a Dicke level
// m in {-N/2, ..., N/2} is stored at offset k = m + N/2 in {0, ..., N}, and
// every vector over the ladder is ordered from m = -N/2 upward.

#include <cstddef>
#include <span>
#include <vector>

namespace superrad {

/// Largest supported atom number.
inline constexpr int kMaxAtoms = 10000;

/// One instance of the collective superradiance master equation.
/// All rates share one (arbitrary) time unit; the CLI fixes gamma = 1.
struct ModelParams {
  int n_atoms = 1;
  double gamma = 1.0;  ///< collective decay rate
  double pump = 0.0;   ///< collective pumping rate w

  /// Throws std::invalid_argument on n_atoms outside [1, kMaxAtoms],
  /// gamma <= 0, pump < 0 or non-finite rates.
  void validate() const;

  /// Effective inverse temperature beta = -ln(w / gamma).
  /// Throws std::domain_error for pump == 0 (beta = +inf).
  double beta() const;

  double spin() const { return 0.5 * n_atoms; }
  std::size_t levels() const { return static_cast<std::size_t>(n_atoms) + 1; }

  ModelParams with_pump(double w) const {
    ModelParams p = *this;
    p.pump = w;
    return p;
  }
};

/// Dicke level m stored as its ladder offset k = m + N/2.
struct DickeIndex {
  int k = 0;

  /// Throws std::invalid_argument if m is not one of -N/2, ..., N/2.
  static DickeIndex from_inversion(double m, int n_atoms);
  double inversion(int n_atoms) const { return k - 0.5 * n_atoms; }
};

/// Inversion m of ladder offset k.
inline double inversion_at(std::size_t k, int n_atoms) {
  return static_cast<double>(k) - 0.5 * n_atoms;
}

/// Probability vector over the N+1 Dicke levels.
class PopulationState {
 public:
  /// Tolerated integrator undershoot below zero; such entries read as 0.
  static constexpr double kNegativeTolerance = 1e-12;
  static constexpr double kNormTolerance = 1e-9;

  /// Validates non-negativity (to kNegativeTolerance) and normalization
  /// (to kNormTolerance); throws std::invalid_argument otherwise.
  explicit PopulationState(std::vector<double> probs);

  static PopulationState ground(int n_atoms);
  static PopulationState fully_excited(int n_atoms);

  int n_atoms() const { return static_cast<int>(probs_.size()) - 1; }
  std::size_t size() const { return probs_.size(); }

  /// Clamped read: tiny negative integrator drift is reported as 0.
  double operator[](std::size_t k) const { return probs_[k] > 0.0 ? probs_[k] : 0.0; }
  std::span<const double> raw() const { return probs_; }

  double total() const;
  double mean_inversion() const;

 private:
  std::vector<double> probs_;
};

/// Transition rates on the N bonds of the ladder. Bond i joins offsets i and
/// i+1: up[i] is the rate for m -> m+1 out of k = i, down[i] the rate for
/// m -> m-1 out of k = i+1. The boundary rates (down out of m = -N/2, up out
/// of m = +N/2) vanish identically and are therefore not stored.
struct LadderRates {
  std::vector<double> up;
  std::vector<double> down;
};

/// up[i] = w (j-m)(j+m+1) at m = i - j; down[i] = gamma (j+m)(j-m+1) at m = i+1-j.
LadderRates ladder_rates(const ModelParams& p);

/// Exact Boltzmann steady state p_m = exp(-beta m) / Z(beta).
/// For pump == 0 the ground Dicke state m = -N/2 is returned.
PopulationState steady_state(const ModelParams& p);

/// Z(beta) = sinh((N+1) beta / 2) / sinh(beta / 2) with the removable
/// singularity at beta = 0 handled by explicit summation for |beta| <= 1e-4.
/// Overflows to +inf once N|beta|/2 exceeds the double range.
double partition_function(double beta, int n_atoms);

/// ln Z(beta), finite for every finite beta.
double log_partition_function(double beta, int n_atoms);

/// Exact <J_z> = -d ln Z / d beta for finite N.
double mean_inversion(const ModelParams& p);
double mean_inversion_at_beta(double beta, int n_atoms);

/// Large-N form N/2 / tanh(N x / 2) - 1/x with x = w/gamma - 1 (0 at x = 0).
double mean_inversion_asymptotic(const ModelParams& p);

/// Exact Var[J_z] = d^2 ln Z / d beta^2.
double inversion_variance(const ModelParams& p);
double inversion_variance_at_beta(double beta, int n_atoms);

}  // namespace superrad
