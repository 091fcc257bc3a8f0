#pragma once

// Independent reference implementations used only by the tests. Everything
// here is built from the textbook definitions (dense matrices, explicit
// sums, Kronecker products) and shares no code with the library.

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace oracle {

struct Moments {
  long double mean = 0.0L;
  long double variance = 0.0L;
};

// Boltzmann moments of J_z by explicit long-double summation.
inline Moments boltzmann(double beta, int n) {
  const long double j = 0.5L * n;
  long double shift = std::fabs(static_cast<long double>(beta)) * j;
  long double z = 0, s1 = 0, s2 = 0;
  for (int k = 0; k <= n; ++k) {
    const long double m = k - j;
    const long double e = std::exp(-static_cast<long double>(beta) * m - shift);
    z += e;
    s1 += m * e;
    s2 += m * m * e;
  }
  Moments r;
  r.mean = s1 / z;
  r.variance = s2 / z - r.mean * r.mean;
  return r;
}

// Collective spin operators on |j, m>, ordered by increasing m.
inline Eigen::MatrixXd j_plus(int n) {
  const double j = 0.5 * n;
  Eigen::MatrixXd jp = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (int k = 0; k < n; ++k) {
    const double m = k - j;
    jp(k + 1, k) = std::sqrt(j * (j + 1) - m * (m + 1));
  }
  return jp;
}

inline Eigen::MatrixXd j_z(int n) {
  Eigen::MatrixXd jz = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (int k = 0; k <= n; ++k) jz(k, k) = k - 0.5 * n;
  return jz;
}

// Dense Lindblad superoperator gamma D[J-] + w D[J+] on column-major vec(rho).
inline Eigen::MatrixXd lindblad_superoperator(int n, double gamma, double w) {
  const Eigen::MatrixXd jp = j_plus(n);
  const Eigen::MatrixXd jm = jp.transpose();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n + 1, n + 1);
  auto dissipator = [&](const Eigen::MatrixXd& a) {
    const Eigen::MatrixXd ad = a.transpose();
    const Eigen::MatrixXd ada = ad * a;
    Eigen::MatrixXd d = Eigen::kroneckerProduct(a, a).eval();  // conj(A) (x) A with real A
    d -= 0.5 * Eigen::kroneckerProduct(id, ada).eval();
    d -= 0.5 * Eigen::kroneckerProduct(ada.transpose(), id).eval();
    return d;
  };
  return gamma * dissipator(jm) + w * dissipator(jp);
}

// Classical rate matrix of the populations, from the Dicke transition rates.
inline Eigen::MatrixXd population_generator(int n, double gamma, double w) {
  const double j = 0.5 * n;
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (int k = 0; k <= n; ++k) {
    const double m = k - j;
    const double up = w * (j - m) * (j + m + 1);
    const double down = gamma * (j + m) * (j - m + 1);
    if (k < n) g(k + 1, k) += up;
    if (k > 0) g(k - 1, k) += down;
    g(k, k) -= up + down;
  }
  return g;
}

inline Eigen::VectorXd expm_apply(const Eigen::MatrixXd& gen, const Eigen::VectorXd& v, double t) {
  const Eigen::MatrixXd a = gen * t;
  return a.exp() * v;
}

// Three-level tensor-product operators for small N, levels 0 = g, 1 = e, 2 = r.
using CMatrix = Eigen::MatrixXcd;

inline CMatrix single(int mu, int nu) {
  CMatrix s = CMatrix::Zero(3, 3);
  s(mu, nu) = 1.0;
  return s;
}

inline CMatrix embed(const CMatrix& op, int site, int n) {
  CMatrix out = CMatrix::Identity(1, 1);
  for (int s = 0; s < n; ++s) {
    const CMatrix f = s == site ? op : CMatrix::Identity(3, 3);
    out = Eigen::kroneckerProduct(out, f).eval();
  }
  return out;
}

inline CMatrix collective(int mu, int nu, int n) {
  const int d = static_cast<int>(std::pow(3, n));
  CMatrix j = CMatrix::Zero(d, d);
  for (int s = 0; s < n; ++s) j += embed(single(mu, nu), s, n);
  return j;
}

// Dense Lindblad right-hand side of the three-level model.
struct ThreeLevelDense {
  CMatrix h;
  std::vector<CMatrix> jumps;

  ThreeLevelDense(int n, double omega, double delta, double gamma_r, double gamma) {
    h = -delta * collective(2, 2, n) + omega * (collective(2, 0, n) + collective(0, 2, n));
    jumps.push_back(std::sqrt(gamma) * collective(0, 1, n));
    jumps.push_back(std::sqrt(gamma_r) * collective(1, 2, n));
  }

  CMatrix rhs(const CMatrix& rho) const {
    const std::complex<double> i(0.0, 1.0);
    CMatrix out = -i * (h * rho - rho * h);
    for (const auto& a : jumps) {
      const CMatrix ad = a.adjoint();
      out += a * rho * ad - 0.5 * (ad * a * rho + rho * ad * a);
    }
    return out;
  }
};

}  // namespace oracle
