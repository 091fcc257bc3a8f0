#include "superrad/rate_generator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace superrad {

RateGenerator::RateGenerator(int n_atoms, double gamma)
    : n_atoms_(n_atoms), gamma_(gamma), bond_(static_cast<std::size_t>(n_atoms)) {
  if (n_atoms < 1) throw std::invalid_argument("RateGenerator: n_atoms must be >= 1");
  for (std::size_t i = 0; i < bond_.size(); ++i) {
    bond_[i] = static_cast<double>(i + 1) * static_cast<double>(bond_.size() - i);
  }
  scratch_.resize(bond_.size() + 1);
}

void RateGenerator::apply(double w, const Eigen::VectorXd& y, Eigen::VectorXd& out) const {
  const std::size_t n = size();
  out.resize(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    double v = diagonal(w, k) * y[k];
    if (k > 0) v += w * bond_[k - 1] * y[k - 1];             // pumped up from k-1
    if (k + 1 < n) v += gamma_ * bond_[k] * y[k + 1];        // decayed down from k+1
    out[k] = v;
  }
}

void RateGenerator::solve_shifted(double w, double alpha, const Eigen::VectorXd& rhs,
                                  Eigen::VectorXd& x) const {
  const std::size_t n = size();
  x.resize(static_cast<Eigen::Index>(n));
  // row k: sub = -alpha w bond[k-1], diag = 1 - alpha L_kk, super = -alpha gamma bond[k]
  std::vector<double>& c = scratch_;
  double b = 1.0 - alpha * diagonal(w, 0);
  double sup = n > 1 ? -alpha * gamma_ * bond_[0] : 0.0;
  c[0] = sup / b;
  x[0] = rhs[0] / b;
  for (std::size_t k = 1; k < n; ++k) {
    const double sub = -alpha * w * bond_[k - 1];
    b = 1.0 - alpha * diagonal(w, k);
    const double denom = b - sub * c[k - 1];
    sup = k + 1 < n ? -alpha * gamma_ * bond_[k] : 0.0;
    c[k] = sup / denom;
    x[k] = (rhs[k] - sub * x[k - 1]) / denom;
  }
  for (std::size_t k = n - 1; k-- > 0;) x[k] -= c[k] * x[k + 1];
}

double RateGenerator::max_diagonal(double w) const {
  double m = 0.0;
  for (std::size_t k = 0; k < size(); ++k) m = std::max(m, std::abs(diagonal(w, k)));
  return m;
}

}  // namespace superrad
