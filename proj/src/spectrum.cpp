#include "superrad/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "superrad/parallel.hpp"

namespace superrad {
namespace {

// squared matrix elements of J_- and J_+ on |m>, with m = k - N/2
double lower_sq(int k, int n) { return static_cast<double>(k) * (n - k + 1); }
double raise_sq(int k, int n) { return static_cast<double>(n - k) * (k + 1); }

std::vector<std::size_t> order_by_magnitude(const Eigen::VectorXd& values) {
  std::vector<std::size_t> idx(static_cast<std::size_t>(values.size()));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(values[static_cast<Eigen::Index>(a)]) <
           std::abs(values[static_cast<Eigen::Index>(b)]);
  });
  return idx;
}

double diagonal_scale(const SectorLiouvillian& s) {
  double scale = 0.0;
  for (double d : s.diag) scale = std::max(scale, std::abs(d));
  return scale;
}

void finish(SectorSpectrum& out) {
  const double threshold = kZeroModeTolerance * out.scale;
  out.zero_modes = 0;
  out.gap = 0.0;
  bool found_gap = false;
  for (double l : out.eigenvalues) {
    if (std::abs(l) < threshold) {
      ++out.zero_modes;
    } else if (!found_gap) {
      out.gap = std::abs(l);
      found_gap = true;
    }
  }
}

}  // namespace

Eigen::MatrixXd SectorLiouvillian::dense() const {
  const auto n = static_cast<Eigen::Index>(dim());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) m(i, i) = diag[static_cast<std::size_t>(i)];
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    m(i + 1, i) = sub[static_cast<std::size_t>(i)];
    m(i, i + 1) = super[static_cast<std::size_t>(i)];
  }
  return m;
}

void SectorLiouvillian::apply(std::span<const double> in, std::span<double> out) const {
  const std::size_t n = dim();
  if (in.size() != n || out.size() != n) throw std::invalid_argument("sector apply: size mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    double v = diag[i] * in[i];
    if (i > 0) v += sub[i - 1] * in[i - 1];
    if (i + 1 < n) v += super[i] * in[i + 1];
    out[i] = v;
  }
}

SectorLiouvillian build_sector(const ModelParams& p, int q) {
  p.validate();
  const int n = p.n_atoms;
  if (q < -n || q > n) {
    throw std::invalid_argument("sector index q = " + std::to_string(q) + " outside [-N, N]");
  }
  SectorLiouvillian s;
  s.n_atoms = n;
  s.q = q;
  // basis |m><m+q| with both offsets in [0, N], ordered by increasing m
  const int k_first = std::max(0, -q);
  const int dim = n + 1 - std::abs(q);
  s.diag.resize(static_cast<std::size_t>(dim));
  s.sub.resize(static_cast<std::size_t>(dim - 1));
  s.super.resize(static_cast<std::size_t>(dim - 1));
  for (int i = 0; i < dim; ++i) {
    const int km = k_first + i;
    const int kn = km + q;
    s.diag[static_cast<std::size_t>(i)] =
        -0.5 * p.gamma * (lower_sq(km, n) + lower_sq(kn, n)) -
        0.5 * p.pump * (raise_sq(km, n) + raise_sq(kn, n));
    if (i + 1 < dim) {
      // J_- |m+1><n+1| J_+  feeds  |m><n|;  J_+ |m><n| J_-  feeds  |m+1><n+1|
      s.super[static_cast<std::size_t>(i)] =
          p.gamma * std::sqrt(lower_sq(km + 1, n) * lower_sq(kn + 1, n));
      s.sub[static_cast<std::size_t>(i)] = p.pump * std::sqrt(raise_sq(km, n) * raise_sq(kn, n));
    }
  }
  return s;
}

SectorSpectrum sector_spectrum(const SectorLiouvillian& sector) {
  SectorSpectrum out;
  out.q = sector.q;
  out.scale = diagonal_scale(sector);
  const auto n = static_cast<Eigen::Index>(sector.dim());

  bool symmetrizable = true;
  for (std::size_t i = 0; i < sector.sub.size(); ++i) {
    if (sector.sub[i] * sector.super[i] < 0.0) symmetrizable = false;
  }

  Eigen::VectorXd values;
  if (symmetrizable) {
    Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(sector.diag.data(), n);
    Eigen::VectorXd off(std::max<Eigen::Index>(n - 1, 0));
    // a zero product splits the matrix into triangular blocks whose
    // eigenvalues are those of the diagonal blocks; a zero coupling matches
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      off[i] = std::sqrt(sector.sub[static_cast<std::size_t>(i)] *
                         sector.super[static_cast<std::size_t>(i)]);
    }
    if (n == 1) {
      values = diag;
    } else {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
      solver.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
      if (solver.info() != Eigen::Success) throw std::runtime_error("tridiagonal eigensolver failed");
      values = solver.eigenvalues();
    }
  } else {
    out.symmetrized = false;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(sector.dense(), false);
    if (solver.info() != Eigen::Success) throw std::runtime_error("dense eigensolver failed");
    values = solver.eigenvalues().real();
    out.max_imaginary = solver.eigenvalues().imag().cwiseAbs().maxCoeff();
  }

  for (std::size_t i : order_by_magnitude(values)) {
    out.eigenvalues.push_back(values[static_cast<Eigen::Index>(i)]);
  }
  finish(out);
  return out;
}

SectorEigensystem sector_eigensystem(const SectorLiouvillian& sector) {
  const auto n = static_cast<Eigen::Index>(sector.dim());
  Eigen::VectorXd log_d(n);
  log_d[0] = 0.0;
  Eigen::VectorXd off(std::max<Eigen::Index>(n - 1, 0));
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double sub = sector.sub[static_cast<std::size_t>(i)];
    const double sup = sector.super[static_cast<std::size_t>(i)];
    if (!(sub > 0.0 && sup > 0.0)) {
      throw std::domain_error("sector_eigensystem needs strictly positive off-diagonals");
    }
    log_d[i + 1] = log_d[i] + 0.5 * (std::log(sup) - std::log(sub));
    off[i] = std::sqrt(sub * sup);
  }
  log_d.array() -= log_d.mean();
  const Eigen::VectorXd d = log_d.array().exp();

  Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(sector.diag.data(), n);
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
  if (n == 1) {
    values = diag;
    vectors = Eigen::MatrixXd::Identity(1, 1);
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) throw std::runtime_error("tridiagonal eigensolver failed");
    values = solver.eigenvalues();
    vectors = solver.eigenvectors();
  }

  SectorEigensystem out;
  const auto order = order_by_magnitude(values);
  out.eigenvalues.resize(n);
  out.right.resize(n, n);
  out.left.resize(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const auto src = static_cast<Eigen::Index>(order[static_cast<std::size_t>(c)]);
    out.eigenvalues[c] = values[src];
    // M = D^-1 T D: right = D^-1 v, left = D v
    out.right.col(c) = vectors.col(src).cwiseQuotient(d);
    out.left.col(c) = vectors.col(src).cwiseProduct(d);
  }
  return out;
}

std::vector<GapPoint> gap_curve(const ModelParams& base, std::span<const double> w_grid) {
  base.validate();
  const auto n = static_cast<std::ptrdiff_t>(w_grid.size());
  std::vector<GapPoint> out(w_grid.size());
#pragma omp parallel for schedule(dynamic) num_threads(worker_count())
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double w = w_grid[static_cast<std::size_t>(i)];
    out[static_cast<std::size_t>(i)] = {w, sector_spectrum(build_sector(base.with_pump(w), 0)).gap};
  }
  return out;
}

std::vector<GapPoint> gap_curve_serial(const ModelParams& base, std::span<const double> w_grid) {
  base.validate();
  std::vector<GapPoint> out;
  out.reserve(w_grid.size());
  for (double w : w_grid) out.push_back({w, sector_spectrum(build_sector(base.with_pump(w), 0)).gap});
  return out;
}

std::vector<double> default_gap_grid(const ModelParams& base, int points) {
  if (points < 2) throw std::invalid_argument("gap grid needs at least two points");
  const double half = 10.0 / base.n_atoms;
  const double lo = std::max(1.0 - half, 1e-3);
  const double hi = 1.0 + half;
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    grid[static_cast<std::size_t>(i)] = base.gamma * (lo + (hi - lo) * i / (points - 1));
  }
  return grid;
}

}  // namespace superrad
