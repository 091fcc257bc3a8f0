#pragma once

// Exact small-N model of N three-level atoms (levels g, e, r): collective
// e -> g decay, collective r -> e decay and a detuned g <-> r drive, and the
// reduction of that model to the collective pumping model by adiabatic
// elimination of the singly r-excited manifold.

#include <array>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "superrad/dicke.hpp"
#include "superrad/integrators.hpp"

namespace superrad {

/// Atom-number cap of the tensor-product representation without override.
inline constexpr int kThreeLevelDefaultMaxAtoms = 6;
/// Hard cap (override required above the default).
inline constexpr int kThreeLevelMaxAtoms = 8;

struct ThreeLevelParams {
  int n_atoms = 1;
  double omega = 0.0;    ///< g <-> r Rabi frequency (>= 0)
  double delta = 1.0;    ///< detuning of r (> 0)
  double gamma_r = 1.0;  ///< collective r -> e decay
  double gamma = 0.0;    ///< collective e -> g decay

  /// Throws std::invalid_argument on bad rates or n_atoms outside
  /// [1, kThreeLevelDefaultMaxAtoms] (kThreeLevelMaxAtoms with allow_large).
  void validate(bool allow_large = false) const;

  /// w = gamma_r (omega / delta)^2
  double pump_rate() const { return gamma_r * (omega / delta) * (omega / delta); }
  /// Two-level model with the same gamma and w = pump_rate().
  ModelParams effective_model() const { return {n_atoms, gamma, pump_rate()}; }
};

struct ValidityReport {
  double drive_ratio = 0.0;        ///< delta / (sqrt(N) omega)
  double decay_ratio = 0.0;        ///< delta / (N gamma_r)
  double collective_ratio = 0.0;   ///< delta / (N^2 gamma)
  double factor = 20.0;
  bool valid = false;              ///< all three ratios >= factor
};

ValidityReport validity(const ThreeLevelParams& p, double factor = 20.0);

/// Blocks over the ground manifold |m> (N+1 symmetric g/e Dicke states,
/// index k = m + N/2) and the excited manifold |m+> (one symmetric r
/// excitation on top of |m>, m < N/2, index k = m + N/2).
struct BlockSystem {
  Eigen::MatrixXcd h_ee;  ///< N x N
  Eigen::MatrixXcd v_eg;  ///< N x (N+1)
  Eigen::MatrixXcd v_ge;  ///< (N+1) x N
  Eigen::MatrixXcd k_ge;  ///< (N+1) x N, r -> e decay
  Eigen::MatrixXcd l_ee;  ///< N x N, e -> g decay inside the excited manifold
  Eigen::MatrixXcd l_gg;  ///< (N+1) x (N+1), e -> g decay inside the ground manifold
};

BlockSystem build_blocks(const ThreeLevelParams& p);

struct EffectiveOperators {
  Eigen::MatrixXcd h_eff;  ///< (N+1) x (N+1)
  Eigen::MatrixXcd k_eff;  ///< (N+1) x (N+1)
};

/// H_nh = H_EE - (i/2) K_GE^dag K_GE, K_eff = -K_GE H_nh^-1 V_EG,
/// H_eff = -V_GE Re(H_nh^-1) V_EG with Re(A) = (A + A^dag) / 2.
/// Throws std::domain_error when H_nh is singular.
EffectiveOperators adiabatic_eliminate(const BlockSystem& blocks);

/// Closed-form matrix elements of the eliminated operators at finite delta.
EffectiveOperators effective_operators_closed_form(const ThreeLevelParams& p);

/// delta >> N gamma_r limit: K_eff = sqrt(w) J_+ and
/// H_eff = (omega^2 / delta) (N - J_ee), where J_ee = N/2 + J_z counts
/// excited atoms; this equals (omega^2 / delta)(N/2 - m) on |m>.
EffectiveOperators effective_operators_high_detuning(const ThreeLevelParams& p);

/// Perturbative pumping rate out of every ground level |m>, indexed by
/// k = m + N/2: w_m = N_g omega^2 (N_e + 1) gamma_r / (delta^2 + gamma_r^2 (N_e + 1)^2 / 4)
/// with N_g = N/2 - m and N_e = N/2 + m.
std::vector<double> pumping_rates_intuitive(const ThreeLevelParams& p);

enum class ThreeLevelBasis {
  /// Full 3^N tensor product of single-atom states.
  TensorProduct,
  /// Permutation-symmetric states labelled by occupations (n_g, n_e, n_r);
  /// invariant under every collective operator, so exact from |g...g>.
  Symmetric,
};

const char* to_string(ThreeLevelBasis b);

/// Lindblad generator of the three-level model in a given basis, acting on
/// dense density matrices.
class ThreeLevelModel {
 public:
  using Sparse = Eigen::SparseMatrix<std::complex<double>>;

  ThreeLevelModel(const ThreeLevelParams& p, ThreeLevelBasis basis, bool allow_large = false);

  int dimension() const { return dim_; }
  ThreeLevelBasis basis() const { return basis_; }
  const ThreeLevelParams& params() const { return params_; }

  /// Collective operator J_{mu nu} = sum_n |mu_n><nu_n| with levels
  /// 0 = g, 1 = e, 2 = r.
  Sparse collective(int mu, int nu) const;

  /// All atoms in g.
  Eigen::MatrixXcd ground_state() const;

  /// d rho / dt, OpenMP over columns.
  void rhs(const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out) const;
  /// Serial reference written as whole-matrix expressions.
  void rhs_serial(const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out) const;

  /// Superoperator on column-major vec(rho).
  Sparse superoperator() const;

  /// Steady state from the superoperator with one population equation
  /// replaced by the trace condition (sparse LU).
  Eigen::MatrixXcd steady_state() const;

  double inversion(const Eigen::MatrixXcd& rho) const;     ///< <(J_ee - J_gg) / 2>
  double r_population(const Eigen::MatrixXcd& rho) const;  ///< <J_rr>

  /// Spectral radius bound: spread of H plus twice ||sum A^dag A||.
  double stiffness_bound() const { return stiffness_; }

  // AdaptiveIntegrator interface (explicit stepping only)
  void apply(double, const Eigen::MatrixXcd& y, Eigen::MatrixXcd& out) const { rhs(y, out); }
  void solve_shifted(double, double, const Eigen::MatrixXcd&, Eigen::MatrixXcd&) const;
  double stiffness_bound(double) const { return stiffness_; }

 private:
  ThreeLevelParams params_;
  ThreeLevelBasis basis_;
  int dim_ = 0;
  std::vector<std::array<int, 3>> occupations_;  ///< (n_g, n_e, n_r) per basis state
  Sparse h_nh_;
  Sparse h_nh_adj_;
  std::vector<Sparse> jumps_;
  std::vector<Sparse> jumps_adj_;
  double stiffness_ = 0.0;
};

struct ThreeLevelTrajectory {
  std::vector<double> times;
  std::vector<double> inversion;
  std::vector<double> r_population;
  double max_trace_error = 0.0;
  double max_hermiticity_error = 0.0;
  IntegratorStats stats{};
};

/// Integrates the full model from all atoms in g with the explicit
/// Dormand-Prince stepper, sampling n_samples uniform times in [0, t_final].
ThreeLevelTrajectory simulate_three_level(const ThreeLevelParams& p, double t_final,
                                          int n_samples, IntegratorOptions options = {},
                                          ThreeLevelBasis basis = ThreeLevelBasis::TensorProduct,
                                          bool allow_large = false);

struct TrajectoryComparison {
  ThreeLevelTrajectory full;
  std::vector<double> effective_inversion;  ///< at full.times
  double max_discrepancy = 0.0;             ///< max |full - effective| over samples
  ValidityReport validity{};
};

/// Full versus effective evolution from the ground state. Sample spacing
/// must be at least 10 / delta (std::invalid_argument otherwise), so that
/// the comparison only sees coarse-grained dynamics.
TrajectoryComparison compare_trajectories(const ThreeLevelParams& p, double t_final, int n_samples,
                                          IntegratorOptions options = {},
                                          ThreeLevelBasis basis = ThreeLevelBasis::TensorProduct,
                                          bool allow_large = false);

struct ConvergencePoint {
  double epsilon = 0.0;  ///< N gamma_r / delta
  ThreeLevelParams params{};
  double inversion_full = 0.0;
  double inversion_effective = 0.0;
  double discrepancy = 0.0;
  double r_population = 0.0;
};

/// Steady-state comparison at the critical point of the effective model.
/// For each epsilon: delta = N gamma_r / epsilon, omega = delta sqrt(epsilon / N),
/// so w = gamma_r epsilon / N, and gamma = w. All three validity ratios then
/// grow as epsilon shrinks. Parallel over epsilon values.
std::vector<ConvergencePoint> convergence_study(int n_atoms, const std::vector<double>& epsilons,
                                                double gamma_r = 1.0,
                                                ThreeLevelBasis basis = ThreeLevelBasis::TensorProduct);

}  // namespace superrad
