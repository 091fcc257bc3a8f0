#include "superrad/three_level.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

#include <Eigen/SparseLU>

#include "superrad/dynamics.hpp"
#include "superrad/errors.hpp"
#include "superrad/parallel.hpp"

namespace superrad {
namespace {

using cd = std::complex<double>;
using Triplet = Eigen::Triplet<cd>;
constexpr cd kI{0.0, 1.0};

int ipow3(int n) {
  int v = 1;
  for (int i = 0; i < n; ++i) v *= 3;
  return v;
}

// max row sum of |entries|: a Gershgorin radius for Hermitian input
double gershgorin_spread(const ThreeLevelModel::Sparse& h) {
  const Eigen::Index d = h.rows();
  std::vector<double> centre(static_cast<std::size_t>(d), 0.0);
  std::vector<double> radius(static_cast<std::size_t>(d), 0.0);
  for (Eigen::Index c = 0; c < h.outerSize(); ++c) {
    for (ThreeLevelModel::Sparse::InnerIterator it(h, c); it; ++it) {
      const auto r = static_cast<std::size_t>(it.row());
      if (it.row() == it.col()) {
        centre[r] = it.value().real();
      } else {
        radius[r] += std::abs(it.value());
      }
    }
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < centre.size(); ++i) {
    lo = std::min(lo, centre[i] - radius[i]);
    hi = std::max(hi, centre[i] + radius[i]);
  }
  return hi - lo;
}

double max_abs_row_sum(const ThreeLevelModel::Sparse& h) {
  std::vector<double> rows(static_cast<std::size_t>(h.rows()), 0.0);
  for (Eigen::Index c = 0; c < h.outerSize(); ++c) {
    for (ThreeLevelModel::Sparse::InnerIterator it(h, c); it; ++it) {
      rows[static_cast<std::size_t>(it.row())] += std::abs(it.value());
    }
  }
  return rows.empty() ? 0.0 : *std::max_element(rows.begin(), rows.end());
}

}  // namespace

void ThreeLevelParams::validate(bool allow_large) const {
  const int cap = allow_large ? kThreeLevelMaxAtoms : kThreeLevelDefaultMaxAtoms;
  if (n_atoms < 1 || n_atoms > cap) {
    throw std::invalid_argument("three-level model supports 1 <= N <= " + std::to_string(cap) +
                                (allow_large ? "" : " without the large-N override") + ", got " +
                                std::to_string(n_atoms));
  }
  if (!std::isfinite(omega) || omega < 0.0) throw std::invalid_argument("omega must be >= 0");
  if (!std::isfinite(delta) || delta <= 0.0) throw std::invalid_argument("delta must be > 0");
  if (!std::isfinite(gamma_r) || gamma_r <= 0.0) throw std::invalid_argument("gamma_r must be > 0");
  if (!std::isfinite(gamma) || gamma <= 0.0) throw std::invalid_argument("gamma must be > 0");
}

ValidityReport validity(const ThreeLevelParams& p, double factor) {
  p.validate(true);
  const double n = p.n_atoms;
  ValidityReport v;
  v.factor = factor;
  v.drive_ratio = p.omega > 0.0 ? p.delta / (std::sqrt(n) * p.omega)
                                : std::numeric_limits<double>::infinity();
  v.decay_ratio = p.delta / (n * p.gamma_r);
  v.collective_ratio = p.delta / (n * n * p.gamma);
  v.valid = v.drive_ratio >= factor && v.decay_ratio >= factor && v.collective_ratio >= factor;
  return v;
}

BlockSystem build_blocks(const ThreeLevelParams& p) {
  p.validate(true);
  const int n = p.n_atoms;
  BlockSystem b;
  b.h_ee = Eigen::MatrixXcd::Zero(n, n);
  b.v_eg = Eigen::MatrixXcd::Zero(n, n + 1);
  b.k_ge = Eigen::MatrixXcd::Zero(n + 1, n);
  b.l_ee = Eigen::MatrixXcd::Zero(n, n);
  b.l_gg = Eigen::MatrixXcd::Zero(n + 1, n + 1);
  for (int k = 0; k < n; ++k) {
    // k = m + N/2 for |m+>; N/2 - m = N - k, N/2 + m = k
    b.h_ee(k, k) = -p.delta;
    b.v_eg(k, k) = p.omega * std::sqrt(static_cast<double>(n - k));
    b.k_ge(k + 1, k) = std::sqrt(p.gamma_r * (k + 1));
    if (k > 0) b.l_ee(k - 1, k) = std::sqrt(p.gamma * k * (n - k));
  }
  for (int k = 0; k < n; ++k) {
    b.l_gg(k, k + 1) = std::sqrt(p.gamma * (n - k) * (k + 1.0));
  }
  b.v_ge = b.v_eg.adjoint();
  return b;
}

EffectiveOperators adiabatic_eliminate(const BlockSystem& b) {
  const Eigen::MatrixXcd h_nh = b.h_ee - 0.5 * kI * (b.k_ge.adjoint() * b.k_ge);
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(h_nh);
  if (!lu.isInvertible()) throw std::domain_error("H_nh is singular");
  const Eigen::MatrixXcd inv = lu.inverse();
  EffectiveOperators e;
  e.k_eff = -b.k_ge * inv * b.v_eg;
  e.h_eff = -b.v_ge * (0.5 * (inv + inv.adjoint())) * b.v_eg;
  return e;
}

EffectiveOperators effective_operators_closed_form(const ThreeLevelParams& p) {
  p.validate(true);
  const int n = p.n_atoms;
  EffectiveOperators e;
  e.k_eff = Eigen::MatrixXcd::Zero(n + 1, n + 1);
  e.h_eff = Eigen::MatrixXcd::Zero(n + 1, n + 1);
  const double ratio = p.omega / p.delta;
  for (int k = 0; k <= n; ++k) {
    const double ne1 = k + 1.0;  // N/2 + m + 1
    const double lorentz = p.gamma_r * ne1 / (2.0 * p.delta);
    if (k < n) {
      e.k_eff(k + 1, k) =
          ratio * std::sqrt(p.gamma_r * (n - k) * ne1) / cd(1.0, lorentz);
    }
    e.h_eff(k, k) = p.omega * ratio * (n - k) / (1.0 + lorentz * lorentz);
  }
  return e;
}

EffectiveOperators effective_operators_high_detuning(const ThreeLevelParams& p) {
  p.validate(true);
  const int n = p.n_atoms;
  EffectiveOperators e;
  e.k_eff = Eigen::MatrixXcd::Zero(n + 1, n + 1);
  e.h_eff = Eigen::MatrixXcd::Zero(n + 1, n + 1);
  const double sqrt_w = std::sqrt(p.pump_rate());
  for (int k = 0; k <= n; ++k) {
    if (k < n) e.k_eff(k + 1, k) = sqrt_w * std::sqrt((n - k) * (k + 1.0));
    // J_ee = k on |m>
    e.h_eff(k, k) = p.omega * p.omega / p.delta * (n - k);
  }
  return e;
}

std::vector<double> pumping_rates_intuitive(const ThreeLevelParams& p) {
  p.validate(true);
  const int n = p.n_atoms;
  std::vector<double> w(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) {
    const double ng = n - k;
    const double ne1 = k + 1.0;
    const double pop = ng * p.omega * p.omega /
                       (p.delta * p.delta + p.gamma_r * p.gamma_r * ne1 * ne1 / 4.0);
    w[static_cast<std::size_t>(k)] = pop * ne1 * p.gamma_r;
  }
  return w;
}

const char* to_string(ThreeLevelBasis b) {
  return b == ThreeLevelBasis::TensorProduct ? "tensor" : "symmetric";
}

ThreeLevelModel::ThreeLevelModel(const ThreeLevelParams& p, ThreeLevelBasis basis, bool allow_large)
    : params_(p), basis_(basis) {
  p.validate(allow_large);
  const int n = p.n_atoms;
  if (basis == ThreeLevelBasis::TensorProduct) {
    dim_ = ipow3(n);
    occupations_.resize(static_cast<std::size_t>(dim_));
    for (int i = 0; i < dim_; ++i) {
      std::array<int, 3> occ{0, 0, 0};
      for (int a = 0, rest = i; a < n; ++a, rest /= 3) ++occ[static_cast<std::size_t>(rest % 3)];
      occupations_[static_cast<std::size_t>(i)] = occ;
    }
  } else {
    for (int nr = 0; nr <= n; ++nr) {
      for (int ne = 0; ne + nr <= n; ++ne) occupations_.push_back({n - ne - nr, ne, nr});
    }
    dim_ = static_cast<int>(occupations_.size());
  }

  const Sparse h = -p.delta * collective(2, 2) + p.omega * (collective(2, 0) + collective(0, 2));
  jumps_ = {std::sqrt(p.gamma) * collective(0, 1), std::sqrt(p.gamma_r) * collective(1, 2)};
  Sparse loss(dim_, dim_);
  for (const auto& a : jumps_) {
    jumps_adj_.push_back(Sparse(a.adjoint()));
    loss += jumps_adj_.back() * a;
  }
  h_nh_ = h - (0.5 * kI) * loss;
  h_nh_.makeCompressed();
  h_nh_adj_ = h_nh_.adjoint();
  h_nh_adj_.makeCompressed();
  stiffness_ = gershgorin_spread(h) + 2.0 * max_abs_row_sum(loss);
}

ThreeLevelModel::Sparse ThreeLevelModel::collective(int mu, int nu) const {
  if (mu < 0 || mu > 2 || nu < 0 || nu > 2) throw std::invalid_argument("level index must be 0, 1 or 2");
  std::vector<Triplet> t;
  if (basis_ == ThreeLevelBasis::TensorProduct) {
    const int n = params_.n_atoms;
    for (int i = 0; i < dim_; ++i) {
      for (int a = 0, place = 1; a < n; ++a, place *= 3) {
        const int digit = (i / place) % 3;
        if (digit == nu) t.emplace_back(i + (mu - nu) * place, i, 1.0);
      }
    }
  } else {
    std::map<std::array<int, 3>, int> index;
    for (int i = 0; i < dim_; ++i) index[occupations_[static_cast<std::size_t>(i)]] = i;
    for (int i = 0; i < dim_; ++i) {
      auto occ = occupations_[static_cast<std::size_t>(i)];
      const int from = occ[static_cast<std::size_t>(nu)];
      if (from == 0) continue;
      if (mu == nu) {
        t.emplace_back(i, i, static_cast<double>(from));
        continue;
      }
      const double amp = std::sqrt(static_cast<double>(from) * (occ[static_cast<std::size_t>(mu)] + 1));
      --occ[static_cast<std::size_t>(nu)];
      ++occ[static_cast<std::size_t>(mu)];
      t.emplace_back(index.at(occ), i, amp);
    }
  }
  Sparse m(dim_, dim_);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

Eigen::MatrixXcd ThreeLevelModel::ground_state() const {
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim_, dim_);
  for (int i = 0; i < dim_; ++i) {
    if (occupations_[static_cast<std::size_t>(i)][0] == params_.n_atoms) rho(i, i) = 1.0;
  }
  return rho;
}

void ThreeLevelModel::rhs(const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out) const {
  const Eigen::Index d = dim_;
  out.resize(d, d);
  std::vector<Eigen::MatrixXcd> right(jumps_.size(), Eigen::MatrixXcd(d, d));
#pragma omp parallel num_threads(worker_count()) if (d >= 64)
  {
    // pass 1: coherent part and rho A^dag
#pragma omp for schedule(static)
    for (Eigen::Index j = 0; j < d; ++j) {
      auto o = out.col(j);
      o.noalias() = h_nh_ * rho.col(j);
      for (Sparse::InnerIterator it(h_nh_adj_, j); it; ++it) o -= rho.col(it.row()) * it.value();
      o *= -kI;
      for (std::size_t a = 0; a < jumps_.size(); ++a) {
        auto r = right[a].col(j);
        r.setZero();
        for (Sparse::InnerIterator it(jumps_adj_[a], j); it; ++it) r += rho.col(it.row()) * it.value();
      }
    }
    // pass 2: A (rho A^dag)
#pragma omp for schedule(static)
    for (Eigen::Index j = 0; j < d; ++j) {
      for (std::size_t a = 0; a < jumps_.size(); ++a) out.col(j).noalias() += jumps_[a] * right[a].col(j);
    }
  }
}

void ThreeLevelModel::rhs_serial(const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out) const {
  out = -kI * (h_nh_ * rho - rho * h_nh_adj_);
  for (std::size_t a = 0; a < jumps_.size(); ++a) out += jumps_[a] * (rho * jumps_adj_[a]);
}

void ThreeLevelModel::solve_shifted(double, double, const Eigen::MatrixXcd&, Eigen::MatrixXcd&) const {
  throw std::logic_error("the three-level model supports explicit stepping only");
}

namespace {

void add_superoperator(const ThreeLevelModel::Sparse& h_nh,
                       const std::vector<ThreeLevelModel::Sparse>& jumps, Eigen::Index d,
                       bool skip_row0, std::vector<Triplet>& t) {
  auto push = [&](Eigen::Index r, Eigen::Index c, cd v) {
    if (!(skip_row0 && r == 0)) t.emplace_back(r, c, v);
  };
  for (Eigen::Index c = 0; c < h_nh.outerSize(); ++c) {
    for (ThreeLevelModel::Sparse::InnerIterator it(h_nh, c); it; ++it) {
      const Eigen::Index i = it.row(), k = it.col();
      for (Eigen::Index j = 0; j < d; ++j) {
        push(i + j * d, k + j * d, -kI * it.value());          // -i H_nh rho
        push(j + i * d, j + k * d, kI * std::conj(it.value()));  // +i rho H_nh^dag
      }
    }
  }
  for (const auto& a : jumps) {
    for (Eigen::Index c1 = 0; c1 < a.outerSize(); ++c1) {
      for (ThreeLevelModel::Sparse::InnerIterator x(a, c1); x; ++x) {
        for (Eigen::Index c2 = 0; c2 < a.outerSize(); ++c2) {
          for (ThreeLevelModel::Sparse::InnerIterator y(a, c2); y; ++y) {
            push(x.row() + y.row() * d, x.col() + y.col() * d, x.value() * std::conj(y.value()));
          }
        }
      }
    }
  }
}

}  // namespace

ThreeLevelModel::Sparse ThreeLevelModel::superoperator() const {
  const Eigen::Index d = dim_;
  std::vector<Triplet> t;
  add_superoperator(h_nh_, jumps_, d, false, t);
  Sparse s(d * d, d * d);
  s.setFromTriplets(t.begin(), t.end());
  s.makeCompressed();
  return s;
}

namespace {

Eigen::MatrixXcd solve_steady_state(const ThreeLevelModel::Sparse& h_nh,
                                    const std::vector<ThreeLevelModel::Sparse>& jumps,
                                    Eigen::Index d) {
  std::vector<Triplet> t;
  add_superoperator(h_nh, jumps, d, true, t);
  for (Eigen::Index i = 0; i < d; ++i) t.emplace_back(0, i + i * d, 1.0);
  ThreeLevelModel::Sparse s(d * d, d * d);
  s.setFromTriplets(t.begin(), t.end());
  s.makeCompressed();

  Eigen::SparseLU<ThreeLevelModel::Sparse> lu;
  lu.analyzePattern(s);
  lu.factorize(s);
  if (lu.info() != Eigen::Success) {
    throw NumericalError("steady-state factorization failed: " + lu.lastErrorMessage());
  }
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(d * d);
  b[0] = 1.0;
  Eigen::VectorXcd x = lu.solve(b);
  // rates span many decades; refinement recovers the lost digits
  for (int it = 0; it < 3; ++it) x += lu.solve(Eigen::VectorXcd(b - s * x));
  Eigen::MatrixXcd rho = Eigen::Map<Eigen::MatrixXcd>(x.data(), d, d);
  rho = 0.5 * (rho + rho.adjoint()).eval();
  rho /= rho.trace().real();
  return rho;
}

double multinomial(const std::array<int, 3>& occ) {
  return std::exp(std::lgamma(occ[0] + occ[1] + occ[2] + 1.0) - std::lgamma(occ[0] + 1.0) -
                  std::lgamma(occ[1] + 1.0) - std::lgamma(occ[2] + 1.0));
}

}  // namespace

Eigen::MatrixXcd ThreeLevelModel::steady_state() const {
  if (basis_ == ThreeLevelBasis::Symmetric) return solve_steady_state(h_nh_, jumps_, dim_);

  // The tensor space holds one invariant block per permutation symmetry
  // class, each with its own steady state. The state reached from |g...g>
  // lives in the symmetric block, so the tensor operators are compressed
  // onto it with an isometry and lifted back.
  std::map<std::array<int, 3>, int> classes;
  for (const auto& occ : occupations_) classes.emplace(occ, 0);
  int next = 0;
  for (auto& [occ, idx] : classes) idx = next++;
  std::vector<Triplet> t;
  for (int i = 0; i < dim_; ++i) {
    const auto& occ = occupations_[static_cast<std::size_t>(i)];
    t.emplace_back(i, classes.at(occ), 1.0 / std::sqrt(multinomial(occ)));
  }
  Sparse v(dim_, next);
  v.setFromTriplets(t.begin(), t.end());
  const Sparse v_adj = v.adjoint();
  const Sparse h_small = v_adj * h_nh_ * v;
  std::vector<Sparse> jumps_small;
  for (const auto& a : jumps_) jumps_small.push_back(Sparse(v_adj * a * v));
  const Eigen::MatrixXcd rho_small = solve_steady_state(h_small, jumps_small, next);
  return v * (rho_small * v_adj);
}

double ThreeLevelModel::inversion(const Eigen::MatrixXcd& rho) const {
  double s = 0.0;
  for (int i = 0; i < dim_; ++i) {
    const auto& o = occupations_[static_cast<std::size_t>(i)];
    s += rho(i, i).real() * 0.5 * (o[1] - o[0]);
  }
  return s;
}

double ThreeLevelModel::r_population(const Eigen::MatrixXcd& rho) const {
  double s = 0.0;
  for (int i = 0; i < dim_; ++i) s += rho(i, i).real() * occupations_[static_cast<std::size_t>(i)][2];
  return s;
}

ThreeLevelTrajectory simulate_three_level(const ThreeLevelParams& p, double t_final, int n_samples,
                                          IntegratorOptions options, ThreeLevelBasis basis,
                                          bool allow_large) {
  if (!(t_final > 0.0) || n_samples < 2) {
    throw std::invalid_argument("simulate_three_level needs t_final > 0 and n_samples >= 2");
  }
  const ThreeLevelModel model(p, basis, allow_large);
  options.stepper = Stepper::DormandPrince45;
  // the stiffness bound is close to the true spectral radius here, and
  // DP45 stays stable out to |h lambda| ~ 3.3 on both axes
  options.stability_fraction = 2.5;
  AdaptiveIntegrator<ThreeLevelModel, Eigen::MatrixXcd> integrator(model, options);
  Eigen::MatrixXcd rho = model.ground_state();
  ThreeLevelTrajectory out;
  double t_prev = 0.0;
  for (int i = 0; i < n_samples; ++i) {
    const double t = t_final * i / (n_samples - 1);
    integrator.advance(rho, t_prev, t);
    t_prev = t;
    out.times.push_back(t);
    out.inversion.push_back(model.inversion(rho));
    out.r_population.push_back(model.r_population(rho));
    out.max_trace_error = std::max(out.max_trace_error, std::abs(rho.trace() - 1.0));
    out.max_hermiticity_error =
        std::max(out.max_hermiticity_error, (rho - rho.adjoint()).cwiseAbs().maxCoeff());
  }
  out.stats = integrator.stats();
  return out;
}

TrajectoryComparison compare_trajectories(const ThreeLevelParams& p, double t_final, int n_samples,
                                          IntegratorOptions options, ThreeLevelBasis basis,
                                          bool allow_large) {
  p.validate(allow_large);
  if (n_samples < 2) throw std::invalid_argument("need at least two samples");
  const double spacing = t_final / (n_samples - 1);
  if (spacing < 10.0 / p.delta) {
    throw std::invalid_argument("sample spacing " + std::to_string(spacing) +
                                " below the coarse-graining time 10/delta = " +
                                std::to_string(10.0 / p.delta));
  }
  TrajectoryComparison cmp;
  cmp.validity = validity(p);
  cmp.full = simulate_three_level(p, t_final, n_samples, options, basis, allow_large);

  IntegratorOptions eff_options = options;
  eff_options.stepper = Stepper::Sdirk3;
  const ModelParams eff = p.effective_model();
  PopulationState state = PopulationState::ground(p.n_atoms);
  double t_prev = 0.0;
  for (double t : cmp.full.times) {
    state = evolve(eff, state, t - t_prev, eff_options);
    t_prev = t;
    cmp.effective_inversion.push_back(state.mean_inversion());
  }
  for (std::size_t i = 0; i < cmp.full.times.size(); ++i) {
    cmp.max_discrepancy =
        std::max(cmp.max_discrepancy, std::abs(cmp.full.inversion[i] - cmp.effective_inversion[i]));
  }
  return cmp;
}

std::vector<ConvergencePoint> convergence_study(int n_atoms, const std::vector<double>& epsilons,
                                                double gamma_r, ThreeLevelBasis basis) {
  std::vector<ConvergencePoint> out(epsilons.size());
  std::vector<std::exception_ptr> errors(epsilons.size());
  const auto count = static_cast<std::ptrdiff_t>(epsilons.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count())
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto u = static_cast<std::size_t>(i);
    try {
      const double eps = epsilons[u];
      if (!(eps > 0.0)) throw std::invalid_argument("epsilon must be > 0");
      ConvergencePoint& pt = out[u];
      pt.epsilon = eps;
      pt.params.n_atoms = n_atoms;
      pt.params.gamma_r = gamma_r;
      pt.params.delta = n_atoms * gamma_r / eps;
      pt.params.omega = pt.params.delta * std::sqrt(eps / n_atoms);
      pt.params.gamma = pt.params.pump_rate();
      const ThreeLevelModel model(pt.params, basis);
      const Eigen::MatrixXcd rho = model.steady_state();
      pt.inversion_full = model.inversion(rho);
      pt.r_population = model.r_population(rho);
      pt.inversion_effective = mean_inversion(pt.params.effective_model());
      pt.discrepancy = std::abs(pt.inversion_full - pt.inversion_effective);
    } catch (...) {
      errors[u] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace superrad
