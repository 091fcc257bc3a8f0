// OpenMP kernels against their serial references.

#include <vector>

#include <benchmark/benchmark.h>

#include "superrad/dynamics.hpp"
#include "superrad/spectrum.hpp"
#include "superrad/three_level.hpp"

namespace {

using namespace superrad;

void BM_GapCurve(benchmark::State& st) {
  const ModelParams base{static_cast<int>(st.range(0)), 1.0, 1.0};
  const auto grid = default_gap_grid(base, 101);
  for (auto _ : st) benchmark::DoNotOptimize(gap_curve(base, grid));
}

void BM_GapCurveSerial(benchmark::State& st) {
  const ModelParams base{static_cast<int>(st.range(0)), 1.0, 1.0};
  const auto grid = default_gap_grid(base, 101);
  for (auto _ : st) benchmark::DoNotOptimize(gap_curve_serial(base, grid));
}

const std::vector<int> kScanNs{50, 100};
const std::vector<double> kScanRates{0.1, 1.0, 10.0};

void BM_HysteresisScan(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(hysteresis_scan(1.0, kScanNs, kScanRates, {}, false, 401));
}

void BM_HysteresisScanSerial(benchmark::State& st) {
  for (auto _ : st) {
    benchmark::DoNotOptimize(hysteresis_scan_serial(1.0, kScanNs, kScanRates, {}, false, 401));
  }
}

Eigen::MatrixXcd probe(int d) {
  Eigen::MatrixXcd rho(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) rho(i, j) = {1.0 / (1 + i + j), 0.1 * (i - j)};
  return rho;
}

void BM_ThreeLevelRhs(benchmark::State& st) {
  const ThreeLevelModel m({static_cast<int>(st.range(0)), 1.0, 20.0, 1.0, 0.01},
                          ThreeLevelBasis::TensorProduct);
  const Eigen::MatrixXcd rho = probe(m.dimension());
  Eigen::MatrixXcd out;
  for (auto _ : st) {
    m.rhs(rho, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_ThreeLevelRhsSerial(benchmark::State& st) {
  const ThreeLevelModel m({static_cast<int>(st.range(0)), 1.0, 20.0, 1.0, 0.01},
                          ThreeLevelBasis::TensorProduct);
  const Eigen::MatrixXcd rho = probe(m.dimension());
  Eigen::MatrixXcd out;
  for (auto _ : st) {
    m.rhs_serial(rho, out);
    benchmark::DoNotOptimize(out.data());
  }
}

}  // namespace

BENCHMARK(BM_GapCurve)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GapCurveSerial)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HysteresisScan)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HysteresisScanSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ThreeLevelRhs)->Arg(4)->Arg(5)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ThreeLevelRhsSerial)->Arg(4)->Arg(5)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
