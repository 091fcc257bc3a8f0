#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "superrad/dicke.hpp"
#include "superrad/dynamics.hpp"
#include "superrad/errors.hpp"
#include "superrad/fitting.hpp"
#include "superrad/metrology.hpp"
#include "superrad/parallel.hpp"
#include "superrad/spectrum.hpp"
#include "superrad/three_level.hpp"

namespace superrad::cli {
namespace {

using json = nlohmann::ordered_json;

// All CLI rates are in units of gamma.
constexpr double kGamma = 1.0;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

using Cell = std::variant<double, long long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

std::string render(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return fmt(*d);
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

json to_json(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return std::isfinite(*d) ? json(*d) : json(nullptr);
  if (const auto* i = std::get_if<long long>(&c)) return *i;
  return std::get<std::string>(c);
}

// non-finite doubles become null, which JSON can represent
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string render(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) return fmt(v.get<double>());
  return v.dump();
}

json base_config(const std::string& command) {
  json c;
  c["command"] = command;
  c["version"] = SUPERRAD_VERSION;
  c["gamma"] = kGamma;
  return c;
}

void write_csv(std::ostream& os, const json& config, const Table& t, const json& summary = {}) {
  os << "# superrad " << SUPERRAD_VERSION << "\n";
  for (const auto& [k, v] : config.items()) os << "# " << k << "=" << render(v) << "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << render(row[i]);
    os << "\n";
  }
  if (summary.is_object()) {
    for (const auto& [k, v] : summary.items()) os << "# summary " << k << "=" << render(v) << "\n";
  }
}

json table_json(const json& config, const Table& t, const json& summary = {}) {
  json j;
  j["config"] = config;
  j["columns"] = t.columns;
  json rows = json::array();
  for (const auto& row : t.rows) {
    json r = json::array();
    for (const auto& c : row) r.push_back(to_json(c));
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  if (summary.is_object()) j["summary"] = summary;
  return j;
}

void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
    out.flush();
    if (!out) throw IoError("failed writing to standard output");
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << content;
  f.close();
  if (!f) throw IoError("failed writing '" + path + "'");
}

std::string render_table(const std::string& format, const json& config, const Table& t,
                         const json& summary = {}) {
  std::ostringstream os;
  if (format == "json") {
    os << table_json(config, t, summary).dump(2) << "\n";
  } else {
    write_csv(os, config, t, summary);
  }
  return os.str();
}

std::vector<double> uniform_grid(double lo, double hi, int points) {
  if (points < 1) throw ArgumentError("--points must be >= 1");
  if (points == 1) {
    if (hi != lo) throw ArgumentError("a single point needs --w-min == --w-max");
    return {lo};
  }
  if (!(hi > lo)) throw ArgumentError("grid needs --w-max > --w-min");
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (points - 1);
  g.back() = hi;
  return g;
}

json fit_json(const PowerLawFit& f) {
  json j;
  j["exponent"] = f.exponent;
  j["prefactor"] = f.prefactor;
  j["window"] = {f.window.lo, f.window.hi};
  j["residual_rms"] = f.residual_rms;
  j["n_points"] = f.n_points;
  return j;
}

IntegratorOptions integrator_from(const std::string& name, bool halve) {
  IntegratorOptions o;
  o.stepper = name == "dp45" ? Stepper::DormandPrince45 : Stepper::Sdirk3;
  o.halve_steps = halve;
  return o;
}

// ---------------------------------------------------------------- steady

struct SteadyArgs {
  int n = 100;
  double w_min = 0.9, w_max = 1.1;
  int points = 401;
  std::string out, format = "csv";
};

std::string cmd_steady(const SteadyArgs& a) {
  if (!(a.w_min > 0.0)) throw ArgumentError("--w-min must be > 0");
  const auto grid = uniform_grid(a.w_min, a.w_max, a.points);
  ModelParams base{a.n, kGamma, kGamma};
  base.validate();
  Table t{{"w_over_gamma", "jz_exact", "jz_asymptotic", "variance"}, {}};
  for (double w : grid) {
    const ModelParams p = base.with_pump(w);
    t.rows.push_back({w, mean_inversion(p), mean_inversion_asymptotic(p), inversion_variance(p)});
  }
  json c = base_config("steady");
  c["n"] = a.n;
  c["w_min"] = a.w_min;
  c["w_max"] = a.w_max;
  c["points"] = a.points;
  return render_table(a.format, c, t);
}

// -------------------------------------------------------------- spectrum

struct SpectrumArgs {
  int n = 100;
  std::optional<double> w_min, w_max;
  int points = 401;
  int sector = 0;
  std::string mode = "spectrum";
  std::string out, format = "csv";
};

std::string cmd_spectrum(const SpectrumArgs& a) {
  ModelParams base{a.n, kGamma, kGamma};
  base.validate();
  std::vector<double> grid;
  if (a.w_min || a.w_max) {
    const auto def = default_gap_grid(base, 2);
    grid = uniform_grid(a.w_min.value_or(def.front()), a.w_max.value_or(def.back()), a.points);
  } else {
    grid = default_gap_grid(base, a.points);
  }
  if (!(grid.front() > 0.0)) throw ArgumentError("pump values must be > 0");

  std::vector<SectorSpectrum> spectra(grid.size());
  const auto count = static_cast<std::ptrdiff_t>(grid.size());
  std::vector<std::string> errors(grid.size());
#pragma omp parallel for schedule(dynamic) num_threads(worker_count())
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto u = static_cast<std::size_t>(i);
    try {
      spectra[u] = sector_spectrum(build_sector(base.with_pump(grid[u]), a.sector));
    } catch (const std::exception& e) {
      errors[u] = e.what();
    }
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw std::invalid_argument(e);
  }

  Table t;
  if (a.mode == "gap") {
    t.columns = {"w_over_gamma", "sector", "gap", "zero_modes", "cumulant_rate"};
    for (std::size_t i = 0; i < grid.size(); ++i) {
      t.rows.push_back({grid[i], static_cast<long long>(a.sector), spectra[i].gap,
                        static_cast<long long>(spectra[i].zero_modes),
                        relaxation_rate_cumulant(base.with_pump(grid[i]))});
    }
  } else {
    t.columns = {"w_over_gamma", "sector", "index", "decay_rate"};
    for (std::size_t i = 0; i < grid.size(); ++i) {
      for (std::size_t k = 0; k < spectra[i].eigenvalues.size(); ++k) {
        t.rows.push_back({grid[i], static_cast<long long>(a.sector), static_cast<long long>(k),
                          -spectra[i].eigenvalues[k]});
      }
    }
  }
  json c = base_config("spectrum");
  c["n"] = a.n;
  c["sector"] = a.sector;
  c["mode"] = a.mode;
  c["w_min"] = grid.front();
  c["w_max"] = grid.back();
  c["points"] = static_cast<int>(grid.size());
  return render_table(a.format, c, t);
}

// ----------------------------------------------------------------- sweep

struct SweepArgs {
  std::vector<int> ns{100};
  std::vector<double> rates;
  std::optional<double> rate_r;
  int points = 2001;
  std::string integrator = "sdirk";
  bool halve_steps = false;
  bool fit = false;
  std::string fit_out;
  std::string loops_out;
  std::string out, format = "csv";
};

std::vector<double> default_rates() { return log_grid(kSlowScanWindow.lo, kFastScanWindow.hi); }

json fits_for(const std::vector<HysteresisPoint>& points, const std::vector<int>& ns) {
  json fits = json::array();
  std::map<int, std::vector<DataPoint>> curves;
  for (int n : ns) {
    std::vector<DataPoint> data;
    for (const auto& p : points) {
      if (p.n_atoms == n && p.loop && p.loop->width > 0.0) {
        data.push_back({p.rate_r, p.loop->scaled_width({n, kGamma, kGamma})});
      }
    }
    json f;
    f["n_atoms"] = n;
    std::optional<PowerLawFit> slow, fast;
    try {
      slow = fit_power_law(data, kSlowScanWindow);
      f["slow"] = fit_json(*slow);
    } catch (const std::invalid_argument& e) {
      f["slow"] = {{"error", e.what()}};
    }
    try {
      fast = fit_power_law(data, kFastScanWindow);
      f["fast"] = fit_json(*fast);
    } catch (const std::invalid_argument& e) {
      f["fast"] = {{"error", e.what()}};
    }
    f["crossover_rate"] = slow && fast ? num(power_law_intersection(*slow, *fast)) : json(nullptr);
    fits.push_back(std::move(f));
    std::vector<DataPoint> windowed;
    for (const auto& d : data) {
      if (d.x >= kCollapseWindow.lo && d.x <= kCollapseWindow.hi) windowed.push_back(d);
    }
    curves[n] = std::move(windowed);
  }
  json out;
  out["fits"] = std::move(fits);
  if (curves.size() >= 2) {
    try {
      // curves hold scaled widths already
      const auto r = collapse_metric(curves, kGamma, false);
      out["collapse"] = {{"spread", r.spread},
                         {"worst_rate", r.worst_x},
                         {"window", {r.overlap.lo, r.overlap.hi}}};
    } catch (const std::invalid_argument& e) {
      out["collapse"] = {{"error", e.what()}};
    }
  }
  return out;
}

std::string cmd_sweep(const SweepArgs& a, std::ostream& out) {
  if (a.ns.empty()) throw ArgumentError("--n needs at least one atom number");
  for (int n : a.ns) ModelParams{n, kGamma, kGamma}.validate();
  std::vector<double> rates = a.rate_r ? std::vector<double>{*a.rate_r}
                                       : (a.rates.empty() ? default_rates() : a.rates);
  for (double r : rates) {
    if (!(r > 0.0)) throw ArgumentError("scan rates must be > 0");
  }
  if (a.points < 2) throw ArgumentError("--points must be >= 2");
  const IntegratorOptions opts = integrator_from(a.integrator, a.halve_steps);
  const bool keep = !a.loops_out.empty();
  const auto points = hysteresis_scan(kGamma, a.ns, rates, opts, keep, a.points);

  json c = base_config("sweep");
  c["n"] = a.ns;
  c["rates"] = rates;
  c["points"] = a.points;
  c["integrator"] = a.integrator;
  c["halve_steps"] = a.halve_steps;
  c["range_policy"] = "gamma -/+ (2 gamma/N) max(10, 5 sqrt(max(r, 1))), lower end >= 0.01";

  Table t{{"n_atoms", "rate_r", "w_plus", "w_minus", "width", "scaled_width", "range_scale",
           "max_norm_drift", "steps_up", "steps_down", "error"},
          {}};
  for (const auto& p : points) {
    if (p.loop) {
      const auto& l = *p.loop;
      t.rows.push_back({static_cast<long long>(p.n_atoms), p.rate_r, l.w_plus, l.w_minus, l.width,
                        l.scaled_width({p.n_atoms, kGamma, kGamma}), l.range_scale,
                        std::max(l.up.max_norm_drift, l.down.max_norm_drift),
                        static_cast<long long>(l.up.stats.accepted),
                        static_cast<long long>(l.down.stats.accepted), std::string()});
    } else {
      const double nan = std::nan("");
      t.rows.push_back({static_cast<long long>(p.n_atoms), p.rate_r, nan, nan, nan, nan, nan, nan,
                        0LL, 0LL, "\"" + p.error + "\""});
    }
  }

  if (keep) {
    Table loops{{"n_atoms", "rate_r", "direction", "t", "w_over_gamma", "jz"}, {}};
    for (const auto& p : points) {
      if (!p.loop) continue;
      for (const SweepResult* s : {&p.loop->up, &p.loop->down}) {
        for (const auto& smp : s->samples) {
          loops.rows.push_back({static_cast<long long>(p.n_atoms), p.rate_r,
                                std::string(to_string(s->direction)), smp.t, smp.w, smp.inversion});
        }
      }
    }
    json lc = c;
    lc["table"] = "loops";
    emit(a.loops_out, render_table("csv", lc, loops), out);
  }

  json summary;
  if (a.fit || !a.fit_out.empty()) {
    const json fits = fits_for(points, a.ns);
    if (!a.fit_out.empty()) {
      json doc;
      doc["config"] = c;
      doc["fits"] = fits["fits"];
      if (fits.contains("collapse")) doc["collapse"] = fits["collapse"];
      emit(a.fit_out, doc.dump(2) + "\n", out);
    }
    for (const auto& f : fits["fits"]) {
      const std::string n = std::to_string(f["n_atoms"].get<int>());
      for (const char* regime : {"slow", "fast"}) {
        const json& r = f[regime];
        if (r.contains("exponent")) {
          summary["eta_" + std::string(regime) + "_n" + n] = r["exponent"];
        } else {
          summary["fit_" + std::string(regime) + "_error_n" + n] = r["error"];
        }
      }
      summary["crossover_rate_n" + n] = f["crossover_rate"];
    }
    if (fits.contains("collapse") && fits["collapse"].contains("spread")) {
      summary["collapse_spread"] = fits["collapse"]["spread"];
    }
  }
  std::size_t failures = 0;
  for (const auto& p : points) failures += p.loop ? 0 : 1;
  summary["failed_points"] = failures;
  return render_table(a.format, c, t, summary);
}

// ------------------------------------------------------------- metrology

struct MetrologyArgs {
  int n = 100;
  double w = 1.0;
  double rate_r = 1.0;
  std::optional<double> total_time;
  double scan_constant = 2.0;
  std::optional<double> eta;
  std::string eta_from;
  std::vector<double> rates;
  std::string out, format = "json";
};

double eta_from_file(const std::string& path, int n) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read '" + path + "'");
  json doc;
  try {
    doc = json::parse(f);
  } catch (const json::exception& e) {
    throw ArgumentError("'" + path + "' is not valid JSON: " + e.what());
  }
  if (!doc.contains("fits") || !doc["fits"].is_array() || doc["fits"].empty()) {
    throw ArgumentError("'" + path + "' holds no fits");
  }
  const json* pick = nullptr;
  for (const auto& fit : doc["fits"]) {
    if (fit.value("n_atoms", -1) == n) pick = &fit;
  }
  if (!pick) pick = &doc["fits"].front();
  const auto& fast = (*pick)["fast"];
  if (!fast.contains("exponent")) throw ArgumentError("'" + path + "' has no fast-regime exponent");
  return fast["exponent"].get<double>();
}

json budget_json(const ProtocolBudget& b) {
  json j;
  j["total_time_T"] = b.total_time_T;
  j["scan_constant_C"] = b.scan_constant_C;
  j["rate_r"] = b.rate_r;
  j["eta"] = b.eta;
  j["sweep_speed"] = b.sweep_speed;
  j["widening"] = b.widening;
  j["delta_w_scan"] = b.delta_w_scan;
  j["n_scans"] = b.n_scans;
  j["delta_w_total"] = b.delta_w_total;
  j["delta_w_total_slow"] = b.delta_w_total_slow;
  j["delta_w_total_fast"] = b.delta_w_total_fast;
  j["crossover_rate"] = b.crossover_rate;
  return j;
}

std::string cmd_metrology(const MetrologyArgs& a) {
  if (a.format != "json") throw ArgumentError("metrology writes JSON only");
  const ModelParams p{a.n, kGamma, a.w};
  p.validate();
  if (!(a.w > 0.0)) throw ArgumentError("--w must be > 0");

  double eta = 0.6;
  std::string eta_source = "default";
  if (!a.eta_from.empty()) {
    eta = eta_from_file(a.eta_from, a.n);
    eta_source = a.eta_from;
  }
  if (a.eta) {
    eta = *a.eta;
    eta_source = "flag";
  }

  json c = base_config("metrology");
  c["n"] = a.n;
  c["w"] = a.w;
  c["rate_r"] = a.rate_r;
  c["T"] = a.total_time ? num(*a.total_time) : json(nullptr);
  c["C"] = a.scan_constant;
  c["eta"] = eta;
  c["eta_source"] = eta_source;
  c["rates"] = a.rates;

  const SensitivityReport s = steady_sensitivity(p);
  json doc;
  doc["config"] = c;
  doc["sensitivity"] = {{"delta_w_single", s.delta_w_single},
                        {"delta_w_times_n", s.delta_w_single * a.n},
                        {"variance", s.variance},
                        {"d_mean_d_beta", s.d_mean_d_beta},
                        {"delta_beta", s.delta_beta},
                        {"fisher_beta", s.fisher_beta},
                        {"cramer_rao_beta", s.cramer_rao_beta},
                        {"saturation_ratio", s.saturation_ratio}};
  if (a.total_time) {
    ProtocolBudget b;
    b.total_time_T = *a.total_time;
    b.scan_constant_C = a.scan_constant;
    b.rate_r = a.rate_r;
    b.eta = eta;
    doc["budget"] = budget_json(total_sensitivity(p, b));
    if (!a.rates.empty()) {
      json scan = json::array();
      for (double r : a.rates) {
        b.rate_r = r;
        try {
          scan.push_back(budget_json(total_sensitivity(p, b)));
        } catch (const InfeasibleBudget& e) {
          scan.push_back({{"rate_r", r}, {"error", e.what()}});
        }
      }
      doc["budget_scan"] = std::move(scan);
    }
  } else if (!a.rates.empty()) {
    throw ArgumentError("--rates needs --T for the budget scan");
  }
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------- oracle

struct OracleArgs {
  std::string mode = "trajectory";
  std::optional<int> n;
  double omega = 1000.0;
  double delta = 20000.0;
  double gamma_r = 100.0;
  double t_final = 4.0;
  int points = 41;
  std::string basis = "symmetric";
  bool allow_large = false;
  double validity_factor = 20.0;
  std::vector<double> epsilons{1e-2, 1e-3, 1e-4};
  std::string out, format = "csv";
};

ThreeLevelBasis basis_from(const std::string& s) {
  return s == "tensor" ? ThreeLevelBasis::TensorProduct : ThreeLevelBasis::Symmetric;
}

std::string cmd_oracle(const OracleArgs& a) {
  const ThreeLevelBasis basis = basis_from(a.basis);
  json c = base_config("oracle");
  c["mode"] = a.mode;
  c["basis"] = a.basis;
  json summary;
  Table t;

  if (a.mode == "convergence") {
    const int n = a.n.value_or(3);
    c["n"] = n;
    c["epsilons"] = a.epsilons;
    const auto pts = convergence_study(n, a.epsilons, 1.0, basis);
    t.columns = {"epsilon", "delta", "omega", "gamma_r", "pump_w", "jz_full", "jz_effective",
                 "discrepancy", "r_population"};
    bool monotone = true;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto& p = pts[i];
      // report rates with gamma as the unit
      const double g = p.params.gamma;
      t.rows.push_back({p.epsilon, p.params.delta / g, p.params.omega / g, p.params.gamma_r / g,
                        p.params.pump_rate() / g, p.inversion_full, p.inversion_effective,
                        p.discrepancy, p.r_population});
      if (i > 0 && pts[i].epsilon < pts[i - 1].epsilon && !(p.discrepancy < pts[i - 1].discrepancy)) {
        monotone = false;
      }
    }
    summary["monotone_in_delta"] = monotone;
    return render_table(a.format, c, t, summary);
  }
  if (a.mode != "trajectory") throw ArgumentError("--mode must be trajectory or convergence");

  const ThreeLevelParams p{a.n.value_or(4), a.omega, a.delta, a.gamma_r, kGamma};
  p.validate(a.allow_large);
  const ValidityReport v = validity(p, a.validity_factor);
  c["n"] = p.n_atoms;
  c["omega"] = a.omega;
  c["delta"] = a.delta;
  c["gamma_r"] = a.gamma_r;
  c["pump_w"] = p.pump_rate();
  c["t_final"] = a.t_final;
  c["points"] = a.points;
  c["validity_factor"] = a.validity_factor;
  c["drive_ratio"] = num(v.drive_ratio);
  c["decay_ratio"] = v.decay_ratio;
  c["collective_ratio"] = v.collective_ratio;
  c["valid"] = v.valid;

  const TrajectoryComparison cmp =
      compare_trajectories(p, a.t_final, a.points, {}, basis, a.allow_large);
  t.columns = {"t", "jz_full", "jz_effective", "abs_diff", "r_population"};
  double r_max = 0.0;
  for (std::size_t i = 0; i < cmp.full.times.size(); ++i) {
    t.rows.push_back({cmp.full.times[i], cmp.full.inversion[i], cmp.effective_inversion[i],
                      std::abs(cmp.full.inversion[i] - cmp.effective_inversion[i]),
                      cmp.full.r_population[i]});
    r_max = std::max(r_max, cmp.full.r_population[i]);
  }
  summary["max_discrepancy"] = cmp.max_discrepancy;
  summary["max_discrepancy_over_half_n"] = cmp.max_discrepancy / (0.5 * p.n_atoms);
  summary["max_r_population"] = r_max;
  summary["r_population_scale"] = p.n_atoms * (a.omega / a.delta) * (a.omega / a.delta);
  summary["max_trace_error"] = cmp.full.max_trace_error;
  summary["max_hermiticity_error"] = cmp.full.max_hermiticity_error;
  return render_table(a.format, c, t, summary);
}

void add_output(CLI::App* sub, std::string& out, std::string& format,
                const std::vector<std::string>& formats) {
  sub->add_option("--out", out, "Output file (default: standard output)");
  sub->add_option("--format", format, "Output format")->check(CLI::IsMember(formats));
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Collective superradiance toolkit: steady states, spectra, sweeps, metrology"};
  app.set_version_flag("--version", std::string(SUPERRAD_VERSION));
  app.require_subcommand(1);

  const std::vector<std::string> table_formats{"csv", "json"};

  SteadyArgs steady;
  auto* s_steady = app.add_subcommand("steady", "Steady-state <J_z> and Var[J_z] over a pump grid");
  s_steady->add_option("--n", steady.n, "Atom number")->capture_default_str();
  s_steady->add_option("--w-min", steady.w_min, "Lowest w/gamma")->capture_default_str();
  s_steady->add_option("--w-max", steady.w_max, "Highest w/gamma")->capture_default_str();
  s_steady->add_option("--points", steady.points, "Grid points")->capture_default_str();
  add_output(s_steady, steady.out, steady.format, table_formats);

  SpectrumArgs spectrum;
  auto* s_spec = app.add_subcommand("spectrum", "Liouvillian sector spectra or gaps over a pump grid");
  s_spec->add_option("--n", spectrum.n, "Atom number")->capture_default_str();
  s_spec->add_option("--w-min", spectrum.w_min, "Lowest w/gamma (default 1 - 10/N)");
  s_spec->add_option("--w-max", spectrum.w_max, "Highest w/gamma (default 1 + 10/N)");
  s_spec->add_option("--points", spectrum.points, "Grid points")->capture_default_str();
  s_spec->add_option("--sector", spectrum.sector, "Coherence order q")->capture_default_str();
  s_spec->add_option("--mode", spectrum.mode, "spectrum or gap")
      ->check(CLI::IsMember({"spectrum", "gap"}))
      ->capture_default_str();
  add_output(s_spec, spectrum.out, spectrum.format, table_formats);

  SweepArgs sweep;
  auto* s_sweep = app.add_subcommand("sweep", "Hysteresis loops over scan rates and atom numbers");
  s_sweep->add_option("--n", sweep.ns, "Atom numbers (comma list)")->delimiter(',')->capture_default_str();
  s_sweep->add_option("--rates", sweep.rates, "Scan rates r/gamma (comma list)")->delimiter(',');
  s_sweep->add_option("--rate-r", sweep.rate_r, "Single scan rate r/gamma");
  s_sweep->add_option("--points", sweep.points, "Samples per sweep")->capture_default_str();
  s_sweep->add_option("--integrator", sweep.integrator, "sdirk or dp45")
      ->check(CLI::IsMember({"sdirk", "dp45"}))
      ->capture_default_str();
  s_sweep->add_flag("--halve-steps", sweep.halve_steps, "Tighten tolerances for a convergence check");
  s_sweep->add_flag("--fit", sweep.fit, "Fit the width exponents per regime");
  s_sweep->add_option("--fit-out", sweep.fit_out, "Write fits as JSON to this file");
  s_sweep->add_option("--loops-out", sweep.loops_out, "Write loop traces as CSV to this file");
  add_output(s_sweep, sweep.out, sweep.format, table_formats);

  MetrologyArgs metro;
  auto* s_metro = app.add_subcommand("metrology", "Steady-state sensitivity and scan budget (JSON)");
  s_metro->add_option("--n", metro.n, "Atom number")->capture_default_str();
  s_metro->add_option("--w", metro.w, "Pump w/gamma")->capture_default_str();
  s_metro->add_option("--rate-r", metro.rate_r, "Scan rate r/gamma")->capture_default_str();
  s_metro->add_option("--T", metro.total_time, "Total experiment time (1/gamma)");
  s_metro->add_option("--C", metro.scan_constant, "Scan-range constant (> 1)")->capture_default_str();
  s_metro->add_option("--eta", metro.eta, "Hysteresis exponent (default 0.6)");
  s_metro->add_option("--eta-from", metro.eta_from, "Take eta from a sweep --fit-out file");
  s_metro->add_option("--rates", metro.rates, "Budget scan over r/gamma (comma list)")->delimiter(',');
  add_output(s_metro, metro.out, metro.format, {"json", "csv"});

  OracleArgs oracle;
  auto* s_oracle = app.add_subcommand("oracle", "Three-level model versus the effective pumping model");
  s_oracle->add_option("--mode", oracle.mode, "trajectory or convergence")
      ->check(CLI::IsMember({"trajectory", "convergence"}))
      ->capture_default_str();
  s_oracle->add_option("--n", oracle.n, "Atom number (default 4, or 3 for convergence)");
  s_oracle->add_option("--omega", oracle.omega, "Rabi frequency / gamma")->capture_default_str();
  s_oracle->add_option("--delta", oracle.delta, "Detuning / gamma")->capture_default_str();
  s_oracle->add_option("--gamma-r", oracle.gamma_r, "r -> e decay / gamma")->capture_default_str();
  s_oracle->add_option("--t-final", oracle.t_final, "Final time (1/gamma)")->capture_default_str();
  s_oracle->add_option("--points", oracle.points, "Samples")->capture_default_str();
  s_oracle->add_option("--basis", oracle.basis, "tensor or symmetric")
      ->check(CLI::IsMember({"tensor", "symmetric"}))
      ->capture_default_str();
  s_oracle->add_flag("--allow-large", oracle.allow_large, "Permit N up to 8");
  s_oracle->add_option("--validity-factor", oracle.validity_factor, "Required ratio for validity")
      ->capture_default_str();
  s_oracle->add_option("--epsilons", oracle.epsilons, "N gamma_r / delta values (convergence)")
      ->delimiter(',')
      ->capture_default_str();
  add_output(s_oracle, oracle.out, oracle.format, table_formats);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kArgumentError;
  }

  try {
    if (s_steady->parsed()) {
      emit(steady.out, cmd_steady(steady), out);
    } else if (s_spec->parsed()) {
      emit(spectrum.out, cmd_spectrum(spectrum), out);
    } else if (s_sweep->parsed()) {
      emit(sweep.out, cmd_sweep(sweep, out), out);
    } else if (s_metro->parsed()) {
      emit(metro.out, cmd_metrology(metro), out);
    } else if (s_oracle->parsed()) {
      emit(oracle.out, cmd_oracle(oracle), out);
    }
  } catch (const IoError& e) {
    err << "superrad: I/O error: " << e.what() << "\n";
    return kIoError;
  } catch (const std::invalid_argument& e) {
    err << "superrad: invalid argument: " << e.what() << "\n";
    return kArgumentError;
  } catch (const InfeasibleBudget& e) {
    err << "superrad: infeasible budget: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const std::exception& e) {
    err << "superrad: numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  }
  return kOk;
}

}  // namespace superrad::cli
