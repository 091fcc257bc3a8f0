#pragma once

// Sector decomposition of the collective Liouvillian. The generator maps the
// span of |m><m+q| into itself for every q in [-N, N], so each sector is a
// real tridiagonal matrix of size N+1-|q| acting on the coefficients of
// |m><m+q| ordered by increasing m.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "superrad/dicke.hpp"

namespace superrad {

struct SectorLiouvillian {
  int n_atoms = 0;
  int q = 0;
  std::vector<double> sub;    ///< sub[i]   = L[i+1][i]  (pumping, m -> m+1)
  std::vector<double> diag;   ///< diag[i]  = L[i][i]
  std::vector<double> super;  ///< super[i] = L[i][i+1]  (decay, m+1 -> m)

  std::size_t dim() const { return diag.size(); }
  Eigen::MatrixXd dense() const;
  void apply(std::span<const double> in, std::span<double> out) const;
};

/// Throws std::invalid_argument when |q| > N.
SectorLiouvillian build_sector(const ModelParams& p, int q);

struct SectorSpectrum {
  int q = 0;
  /// Eigenvalues (negated decay rates) sorted by increasing |lambda|.
  std::vector<double> eigenvalues;
  /// Smallest |lambda| among modes that are not zero modes.
  double gap = 0.0;
  int zero_modes = 0;
  /// Scale used by the zero-mode threshold: max |diag|.
  double scale = 0.0;
  /// False when some sub*super product was negative and the general dense
  /// solver was used; eigenvalues then hold real parts.
  bool symmetrized = true;
  double max_imaginary = 0.0;
};

/// |lambda| < kZeroModeTolerance * max|diag| counts as a steady-state mode.
inline constexpr double kZeroModeTolerance = 1e-9;

/// Full spectrum via the diagonal similarity that makes the sector
/// symmetric, followed by a symmetric tridiagonal eigensolver.
SectorSpectrum sector_spectrum(const SectorLiouvillian& sector);

/// Right/left eigenvectors of a symmetrizable sector in the original basis,
/// with left(:,i) . right(:,j) = delta_ij. Columns follow eigenvalue order.
/// Throws std::domain_error for a non-symmetrizable sector.
struct SectorEigensystem {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd right;
  Eigen::MatrixXd left;
};
SectorEigensystem sector_eigensystem(const SectorLiouvillian& sector);

struct GapPoint {
  double w = 0.0;
  double gap = 0.0;
};

/// Diag^(0) gap at every pump value of the grid (OpenMP over grid points).
std::vector<GapPoint> gap_curve(const ModelParams& base, std::span<const double> w_grid);
/// Serial reference for gap_curve.
std::vector<GapPoint> gap_curve_serial(const ModelParams& base, std::span<const double> w_grid);

/// Default grid: `points` values of w/gamma spread uniformly over
/// [1 - 10/N, 1 + 10/N] (clipped to stay positive), times gamma.
std::vector<double> default_gap_grid(const ModelParams& base, int points = 401);

}  // namespace superrad
