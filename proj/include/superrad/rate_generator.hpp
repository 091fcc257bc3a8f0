#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace superrad {

/// Population generator L(w) = gamma * L_down + w * L_up of the Dicke ladder,
/// a tridiagonal matrix with zero column sums. Bond weight i is
/// (i+1)(N-i): the rate per unit gamma (or w) across bond i <-> i+1.
class RateGenerator {
 public:
  RateGenerator(int n_atoms, double gamma);

  int n_atoms() const { return n_atoms_; }
  double gamma() const { return gamma_; }
  std::size_t size() const { return bond_.size() + 1; }

  /// out = L(w) y
  void apply(double w, const Eigen::VectorXd& y, Eigen::VectorXd& out) const;

  /// Solves (1 - alpha L(w)) x = rhs by the Thomas algorithm; the matrix is
  /// a column diagonally dominant M-matrix for alpha >= 0, so no pivoting.
  void solve_shifted(double w, double alpha, const Eigen::VectorXd& rhs, Eigen::VectorXd& x) const;

  /// Gershgorin-type scale max_k |L_kk|.
  double max_diagonal(double w) const;

  double diagonal(double w, std::size_t k) const {
    double d = 0.0;
    if (k < bond_.size()) d -= w * bond_[k];
    if (k > 0) d -= gamma_ * bond_[k - 1];
    return d;
  }

 private:
  int n_atoms_;
  double gamma_;
  std::vector<double> bond_;
  mutable std::vector<double> scratch_;
};

/// Linear pump ramp w(t) = w0 + slope * t.
struct PumpRamp {
  double w0 = 0.0;
  double slope = 0.0;
  double at(double t) const { return w0 + slope * t; }
};

/// Adapter exposing a RateGenerator with a pump ramp to AdaptiveIntegrator.
/// Not shareable between threads (the generator owns solver scratch).
class RampedRateSystem {
 public:
  RampedRateSystem(const RateGenerator& generator, PumpRamp ramp)
      : generator_(generator), ramp_(ramp) {}

  void apply(double t, const Eigen::VectorXd& y, Eigen::VectorXd& out) const {
    generator_.apply(ramp_.at(t), y, out);
  }
  void solve_shifted(double t, double alpha, const Eigen::VectorXd& rhs, Eigen::VectorXd& out) const {
    generator_.solve_shifted(ramp_.at(t), alpha, rhs, out);
  }
  /// Gershgorin bound on the spectral radius (column sums vanish, so the
  /// off-diagonal mass equals |L_kk| in every column).
  double stiffness_bound(double t) const { return 2.0 * generator_.max_diagonal(ramp_.at(t)); }

  const PumpRamp& ramp() const { return ramp_; }

 private:
  const RateGenerator& generator_;
  PumpRamp ramp_;
};

}  // namespace superrad
