#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "rel.hpp"
#include "oracle.hpp"
#include "superrad/dynamics.hpp"
#include "superrad/errors.hpp"
#include "superrad/spectrum.hpp"

using namespace superrad;
using doctest::Approx;

namespace {

double max_deviation(const PopulationState& a, const PopulationState& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
  return d;
}

Eigen::VectorXd ramp_start(int n) {
  Eigen::VectorXd v(n + 1);
  for (int k = 0; k <= n; ++k) v(k) = 1.0 + 0.3 * std::sin(1.7 * k);
  return v / v.sum();
}

}  // namespace

TEST_CASE("evolve matches the matrix exponential of the population generator") {
  for (int n : {1, 4, 10}) {
    for (double w : {0.0, 0.6, 1.0, 1.8}) {
      const Eigen::VectorXd v0 = ramp_start(n);
      const PopulationState init(std::vector<double>(v0.data(), v0.data() + v0.size()));
      for (double t : {0.05, 0.7, 3.0}) {
        const PopulationState got = evolve({n, 1.0, w}, init, t);
        const Eigen::VectorXd ref = oracle::expm_apply(oracle::population_generator(n, 1.0, w), v0, t);
        for (int k = 0; k <= n; ++k) CHECK(std::abs(got[k] - ref(k)) < 1e-7);
      }
    }
  }
}

TEST_CASE("single atom decays exponentially") {
  const PopulationState up = PopulationState::fully_excited(1);
  for (double t : {0.1, 1.0, 4.0}) {
    const PopulationState s = evolve({1, 1.0, 0.0}, up, t);
    CHECK(s[1] == Approx(std::exp(-t)).epsilon(1e-7));
    CHECK(s[0] == Approx(1.0 - std::exp(-t)).epsilon(1e-7));
  }
}

TEST_CASE("steady state is a fixed point and the generator annihilates it") {
  for (double w : {0.3, 1.0, 1.05, 3.0}) {
    const ModelParams p{60, 1.0, w};
    const PopulationState ss = steady_state(p);
    for (double t : {0.5, 10.0}) CHECK(max_deviation(evolve(p, ss, t), ss) < 1e-9);

    const Eigen::MatrixXd g = oracle::population_generator(p.n_atoms, 1.0, w);
    Eigen::VectorXd v(ss.size());
    for (std::size_t k = 0; k < ss.size(); ++k) v(k) = ss[k];
    CHECK((g * v).norm() < 1e-10 * g.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("relaxation to the critical steady state within t = 20/gamma") {
  const ModelParams p{100, 1.0, 1.0};
  const PopulationState ss = steady_state(p);
  for (const auto& init : {PopulationState::ground(100), PopulationState::fully_excited(100)}) {
    const PopulationState s = evolve(p, init, 20.0);
    CHECK(max_deviation(s, ss) < 1e-6);
    CHECK(std::abs(s.total() - 1.0) < 1e-8);
  }
}

TEST_CASE("transient reproduced by projecting onto sector eigenmodes") {
  for (int n : {5, 30}) {
    const ModelParams p{n, 1.0, 0.9};
    const SectorEigensystem es = sector_eigensystem(build_sector(p, 0));
    const Eigen::VectorXd v0 = ramp_start(n);
    const PopulationState init(std::vector<double>(v0.data(), v0.data() + v0.size()));
    for (double t : {0.01, 0.2, 1.5}) {
      const Eigen::VectorXd coeff = es.left.transpose() * v0;
      const Eigen::VectorXd modes =
          es.right * (coeff.array() * (es.eigenvalues.array() * t).exp()).matrix();
      const PopulationState s = evolve(p, init, t);
      for (int k = 0; k <= n; ++k) CHECK(std::abs(s[k] - modes(k)) < 1e-6);
    }
  }
}

TEST_CASE("step halving changes the final inversion by less than 1e-6 N") {
  const ModelParams p{80, 1.0, 1.02};
  IntegratorOptions fine;
  fine.halve_steps = true;
  const PopulationState a = evolve(p, PopulationState::ground(80), 5.0);
  const PopulationState b = evolve(p, PopulationState::ground(80), 5.0, fine);
  CHECK(std::abs(a.mean_inversion() - b.mean_inversion()) < 1e-6 * 80);
}

TEST_CASE("adiabatic sweep follows the steady-state curve") {
  const ModelParams base{100, 1.0, 1.0};
  for (SweepDirection d : {SweepDirection::Up, SweepDirection::Down}) {
    SweepProtocol proto = default_sweep_protocol(base, 1e-3, d);
    proto.n_samples = 201;
    const SweepResult r = sweep(base, proto);
    CHECK(r.max_norm_drift < 1e-8);
    double worst = 0.0;
    for (const auto& s : r.samples) {
      worst = std::max(worst, std::abs(s.inversion - mean_inversion(base.with_pump(s.w))));
    }
    CHECK(worst < 0.005 * 50.0);
  }
}

TEST_CASE("fast up-sweep crosses late and loops are symmetric") {
  const ModelParams base{100, 1.0, 1.0};
  for (double r : {0.1, 1.0, 16.0}) {
    const HysteresisLoop loop = hysteresis_width(base, r);
    CHECK(loop.w_plus > 1.0);
    CHECK(loop.w_minus < 1.0);
    CHECK(std::abs((loop.w_plus - 1.0) - (1.0 - loop.w_minus)) < 0.05 * loop.width);
    CHECK(loop.up.max_norm_drift < 1e-8);
    CHECK(loop.down.max_norm_drift < 1e-8);
  }
}

TEST_CASE("slow-scan width follows r/gamma") {
  const ModelParams base{100, 1.0, 1.0};
  CHECK(hysteresis_width(base, 0.1).scaled_width(base) == rel(0.1, 0.3));
}

// Runs as its own ctest entry: the measured width at r = 16 is about 9.0,
// outside the 40% band around sqrt(2 r) = 5.66.
TEST_CASE("fast-scan width near sqrt(2 r) at r = 16") {
  const ModelParams base{100, 1.0, 1.0};
  const double scaled = hysteresis_width(base, 16.0).scaled_width(base);
  MESSAGE("scaled width at r = 16: " << scaled << " (reference " << std::sqrt(32.0) << ")");
  CHECK(std::abs(scaled / std::sqrt(32.0) - 1.0) <= 0.4);
}

TEST_CASE("loop width shrinks monotonically as r decreases below gamma") {
  const ModelParams base{60, 1.0, 1.0};
  double prev = 0.0;
  for (double r : {0.01, 0.03, 0.1, 0.3, 0.9}) {
    const double w = hysteresis_width(base, r, {}, 801).width;
    CHECK(w > prev);
    prev = w;
  }
}

TEST_CASE("explicit and implicit steppers agree on crossings") {
  const ModelParams base{50, 1.0, 1.0};
  IntegratorOptions dp;
  dp.stepper = Stepper::DormandPrince45;
  for (double r : {0.3, 8.0}) {
    const HysteresisLoop a = hysteresis_width(base, r);
    const HysteresisLoop b = hysteresis_width(base, r, dp);
    CHECK(std::abs(a.w_plus - b.w_plus) < 1e-3 * a.width);
    CHECK(std::abs(a.w_minus - b.w_minus) < 1e-3 * a.width);
  }
}

TEST_CASE("parallel hysteresis scan equals the serial reference") {
  const std::vector<int> ns{20, 40};
  const std::vector<double> rates{0.05, 0.5, 5.0};
  const auto par = hysteresis_scan(1.0, ns, rates, {}, false, 401);
  const auto ser = hysteresis_scan_serial(1.0, ns, rates, {}, false, 401);
  REQUIRE(par.size() == ser.size());
  for (std::size_t i = 0; i < par.size(); ++i) {
    CHECK(par[i].n_atoms == ser[i].n_atoms);
    CHECK(par[i].rate_r == ser[i].rate_r);
    REQUIRE(par[i].loop.has_value());
    REQUIRE(ser[i].loop.has_value());
    CHECK(par[i].loop->width == ser[i].loop->width);
    CHECK(par[i].loop->up.samples.empty());
  }
}

TEST_CASE("sweep protocol validation") {
  SweepProtocol bad;
  bad.rate_r = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  const SweepProtocol pr = default_sweep_protocol({10, 1.0, 1.0}, 1.0, SweepDirection::Up);
  CHECK(pr.w_start < 1.0);
  CHECK(pr.w_end > 1.0);
  CHECK(pr.w_start >= kMinSweepPump);
}

TEST_CASE("correlation function: equal-time value and fitted rates") {
  {
    const ModelParams p{100, 1.0, 1.0};
    const CorrelationSeries c = correlation_zz(p, 10.0, 1001);
    CHECK(c.values.front() == Approx(inversion_variance(p)).epsilon(1e-10));
    CHECK(c.fitted_rate == rel(2.0, 0.05));
  }
  {
    const ModelParams p{100, 1.0, 1.2};
    const CorrelationSeries c = correlation_zz(p, 1.5, 1001);
    CHECK(c.values.front() == Approx(inversion_variance(p)).epsilon(1e-10));
    CHECK(c.fitted_rate == rel(20.0, 0.15));
  }
  CHECK_THROWS_AS(correlation_zz({100, 1.0, 1.0}, 0.01, 11), NumericalError);
}

TEST_CASE("cumulant relaxation rate") {
  CHECK(relaxation_rate_cumulant({100, 1.0, 1.0}) == Approx(2.0).epsilon(1e-12));
  CHECK(relaxation_rate_cumulant({100, 1.0, 1.5}) == rel(50.0, 0.02));
  // the closure neglects the third cumulant and overestimates the gap away from w = gamma
  for (int i = -10; i <= 10; ++i) {
    const ModelParams p{100, 1.0, 1.0 + 0.01 * i};
    const double gap = sector_spectrum(build_sector(p, 0)).gap;
    const double lam = relaxation_rate_cumulant(p);
    CHECK(lam >= gap - 1e-9);
    if (std::abs(i) <= 2) CHECK(std::abs(gap - lam) <= std::max(0.1 * gap, 2.0));
  }
}

// Runs as its own ctest entry: at w = 1.1 the gap is 6.77 while the closure gives 10.1.
TEST_CASE("cumulant rate inside the gap tolerance band across 0.9 to 1.1") {
  double worst = 0.0;
  for (int i = -10; i <= 10; ++i) {
    const ModelParams p{100, 1.0, 1.0 + 0.01 * i};
    const double gap = sector_spectrum(build_sector(p, 0)).gap;
    const double excess = std::abs(gap - relaxation_rate_cumulant(p)) - std::max(0.1 * gap, 2.0);
    worst = std::max(worst, excess);
  }
  MESSAGE("largest excess over the band: " << worst);
  CHECK(worst <= 0.0);
}

TEST_CASE("adiabatic boundaries") {
  const ModelParams base{100, 1.0, 1.0};
  const AdiabaticBoundaries slow = adiabatic_boundaries(base, 0.01);
  CHECK(slow.w_minus < 1.0);
  CHECK(slow.w_plus > 1.0);
  CHECK(slow.width() == rel(0.02 * 0.01, 0.2));
  const AdiabaticBoundaries fast = adiabatic_boundaries(base, 100.0);
  CHECK(fast.w_minus < 1.0);
  CHECK(fast.w_plus > 1.0);
  CHECK(fast.width() == rel(0.02 * std::sqrt(200.0), 0.2));
}
