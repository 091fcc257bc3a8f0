#pragma once

#include <string>

#include "superrad/dicke.hpp"

namespace superrad {

struct SensitivityReport {
  double delta_w_single = 0.0;  ///< w sqrt(Var) / |d<J_z>/d beta|
  double variance = 0.0;        ///< Var[J_z], closed form
  double d_mean_d_beta = 0.0;   ///< d<J_z>/d beta, analytic
  double delta_beta = 0.0;      ///< error-propagation estimate of beta
  double fisher_beta = 0.0;     ///< I_beta by direct enumeration of the distribution
  double cramer_rao_beta = 0.0; ///< 1 / sqrt(I_beta)
  double saturation_ratio = 0.0;
};

/// Single-shot sensitivity of w from the steady-state population
/// distribution. Needs pump > 0.
SensitivityReport steady_sensitivity(const ModelParams& p);

struct ProtocolBudget {
  double total_time_T = 0.0;
  double scan_constant_C = 0.0;
  double rate_r = 0.0;
  double eta = 0.6;

  double sweep_speed = 0.0;       ///< dw/dt = 2 gamma r / N
  double widening = 1.0;          ///< max(1, (r/gamma)^eta)
  double delta_w_scan = 0.0;      ///< C delta_w_single widening
  double n_scans = 0.0;           ///< sweep_speed T / (2 delta_w_scan)
  double delta_w_total = 0.0;     ///< delta_w_single widening / sqrt(n_scans)
  double delta_w_total_slow = 0.0;  ///< asymptote with widening 1
  double delta_w_total_fast = 0.0;  ///< asymptote with widening (r/gamma)^eta
  double crossover_rate = 0.0;      ///< r where the two asymptotes meet
};

/// Completes the derived fields of `budget` from its inputs (T, C, r, eta).
/// Throws std::invalid_argument for T <= 0, C <= 1, r <= 0 and
/// InfeasibleBudget when fewer than one scan fits in T.
ProtocolBudget total_sensitivity(const ModelParams& p, ProtocolBudget budget);

}  // namespace superrad
