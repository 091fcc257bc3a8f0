#include <cmath>
#include <limits>
#include <stdexcept>

#include "doctest.h"
#include "oracle.hpp"
#include "superrad/dicke.hpp"

using namespace superrad;
using doctest::Approx;

TEST_CASE("ladder rates: single atom and N=2 examples") {
  const LadderRates one = ladder_rates({1, 1.0, 0.0});
  REQUIRE(one.down.size() == 1);
  CHECK(one.down[0] == doctest::Approx(1.0));
  CHECK(one.up[0] == 0.0);

  // m = 0 -> -1 for j = 1: (j+m)(j-m+1) = 2
  const LadderRates two = ladder_rates({2, 1.0, 0.5});
  CHECK(two.down[0] == Approx(2.0));
  CHECK(two.up[1] == Approx(0.5 * 2.0));
}

TEST_CASE("ladder rates: up out of m equals down out of -m at w = gamma") {
  const int n = 100;
  const LadderRates r = ladder_rates({n, 1.0, 1.0});
  for (int i = 0; i < n; ++i) CHECK(r.up[i] == Approx(r.down[n - 1 - i]).epsilon(1e-15));
}

TEST_CASE("steady state examples") {
  const PopulationState uni = steady_state({2, 1.0, 1.0});
  for (std::size_t k = 0; k < 3; ++k) CHECK(uni[k] == Approx(1.0 / 3.0).epsilon(1e-14));

  const PopulationState hot = steady_state({2, 1.0, 2.0});
  CHECK(hot[0] == Approx(1.0 / 7.0).epsilon(1e-14));
  CHECK(hot[1] == Approx(2.0 / 7.0).epsilon(1e-14));
  CHECK(hot[2] == Approx(4.0 / 7.0).epsilon(1e-14));

  for (int n : {1, 7, 100}) {
    const PopulationState cold = steady_state({n, 1.0, 1e-9});
    CHECK(cold[0] > 1.0 - 1e-6);
    const PopulationState dead = steady_state({n, 1.0, 0.0});
    CHECK(dead[0] == 1.0);
  }
}

TEST_CASE("steady state satisfies detailed balance") {
  for (int n : {1, 2, 5, 50, 200}) {
    for (double w = 0.5; w <= 2.0 + 1e-12; w += 0.125) {
      const ModelParams p{n, 1.0, w};
      const PopulationState s = steady_state(p);
      const LadderRates r = ladder_rates(p);
      for (int i = 0; i < n; ++i) {
        const double fwd = s[i] * r.up[i];
        const double bwd = s[i + 1] * r.down[i];
        const double scale = std::max(fwd, bwd);
        if (scale < 1e-280) continue;
        CHECK(std::abs(fwd - bwd) <= 1e-12 * scale);
      }
    }
  }
}

TEST_CASE("partition function examples") {
  CHECK(partition_function(0.0, 100) == Approx(101.0).epsilon(1e-15));
  CHECK(partition_function(std::log(2.0), 2) == Approx(3.5).epsilon(1e-14));
  for (double beta : {1e-5, 1e-3, 0.4}) {
    long double z = 0;
    for (int k = 0; k <= 10; ++k) z += std::exp(-static_cast<long double>(beta) * (k - 5));
    CHECK(partition_function(beta, 10) == Approx(static_cast<double>(z)).epsilon(1e-13));
  }
  const double beta = 30.0;
  CHECK(log_partition_function(beta, 40) == Approx(0.5 * 40 * beta).epsilon(1e-12));
  CHECK(std::isinf(partition_function(50.0, 10000)));
  CHECK(std::isfinite(log_partition_function(50.0, 10000)));
}

TEST_CASE("mean inversion: examples and long-double oracle") {
  for (int n : {1, 2, 50, 101}) CHECK(mean_inversion({n, 1.0, 1.0}) == 0.0);
  CHECK(mean_inversion({2, 1.0, 2.0}) == Approx(3.0 / 7.0).epsilon(1e-14));
  const double hot = mean_inversion({100, 1.0, 1.2});
  CHECK(hot < 50.0);
  CHECK(50.0 - hot < 10.0);  // O(1/N) relative: 1/x = 5 here

  for (int n : {1, 3, 10, 100, 500}) {
    for (double beta : {-2.0, -0.3, -1e-3, 1e-6, 0.05, 0.7}) {
      const auto ref = oracle::boltzmann(beta, n);
      CHECK(mean_inversion_at_beta(beta, n) ==
            Approx(static_cast<double>(ref.mean)).epsilon(1e-11).scale(1e-12 * n));
      CHECK(inversion_variance_at_beta(beta, n) ==
            Approx(static_cast<double>(ref.variance)).epsilon(1e-10));
    }
  }
}

TEST_CASE("mean inversion is monotone and beta-antisymmetric") {
  const int n = 100;
  double prev = -std::numeric_limits<double>::infinity();
  for (double w = 0.5; w <= 2.0; w += 0.005) {
    const double m = mean_inversion({n, 1.0, w});
    CHECK(m > prev);
    prev = m;
    const double mirror = mean_inversion({n, 1.0, 1.0 / w});
    CHECK(std::abs(m + mirror) <= 1e-12 * std::max(1.0, std::abs(m)));
  }
}

TEST_CASE("asymptotic mean inversion") {
  CHECK(mean_inversion_asymptotic({100, 1.0, 1.0}) == 0.0);
  const int n = 100;
  const double x = 1e-6 / n;
  CHECK(mean_inversion_asymptotic({n, 1.0, 1.0 + x}) / x == Approx(n * n / 12.0).epsilon(1e-6));
  const double exact = mean_inversion({n, 1.0, 1.1});
  CHECK(std::abs(mean_inversion_asymptotic({n, 1.0, 1.1}) - exact) < 0.01 * std::abs(exact));
}

TEST_CASE("variance examples and finite-difference identity") {
  CHECK(inversion_variance({100, 1.0, 1.0}) == Approx(850.0).epsilon(1e-13));
  for (int n : {1000, 10000}) {
    CHECK(inversion_variance({n, 1.0, 1.0}) / (n * n / 12.0) == Approx(1.0).epsilon(2.0 / n));
  }
  CHECK(inversion_variance({100, 1.0, 1e-12}) == Approx(1e-12).epsilon(1e-6));

  const double h = 1e-5;
  for (int n : {2, 20, 100}) {
    for (double beta : {-0.2, -0.01, 0.0, 0.03, 0.5}) {
      const double fd =
          -(mean_inversion_at_beta(beta + h, n) - mean_inversion_at_beta(beta - h, n)) / (2 * h);
      CHECK(inversion_variance_at_beta(beta, n) == Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("validation errors") {
  CHECK_THROWS_AS(ModelParams({0, 1.0, 1.0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams({kMaxAtoms + 1, 1.0, 1.0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams({5, 0.0, 1.0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams({5, 1.0, -1.0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams({5, 1.0, std::nan("")}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams({5, 1.0, 0.0}).beta(), std::domain_error);
  CHECK_THROWS_AS(DickeIndex::from_inversion(0.5, 2), std::invalid_argument);
  CHECK(DickeIndex::from_inversion(-1.0, 2).k == 0);
  CHECK_THROWS_AS(PopulationState({0.5, 0.6}), std::invalid_argument);
  CHECK_THROWS_AS(PopulationState({1.1, -0.1}), std::invalid_argument);
  const PopulationState ok({1.0 + 1e-12, -1e-13});
  CHECK(ok[1] == 0.0);
}
