#pragma once

namespace superrad {

/// Environment variable read by worker_count().
inline constexpr const char* kThreadsEnv = "SUPERRAD_NUM_THREADS";

/// Worker count for the OpenMP grid kernels: $SUPERRAD_NUM_THREADS when it
/// holds a positive integer, otherwise the available hardware parallelism.
int worker_count();

/// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if ((sum_ >= 0 ? sum_ : -sum_) >= (x >= 0 ? x : -x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

}  // namespace superrad
