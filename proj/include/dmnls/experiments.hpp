#pragma once

#include <chrono>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "dmnls/config.hpp"
#include "dmnls/dispersion.hpp"
#include "dmnls/evolution.hpp"
#include "dmnls/field_io.hpp"
#include "dmnls/ground_state.hpp"
#include "dmnls/norms.hpp"
#include "dmnls/propagators.hpp"
#include "dmnls/rate_fit.hpp"
#include "dmnls/version.hpp"

namespace dmnls {

// One measurement of a convergence study; mirrors one CSV row.
struct StudyRow {
  double eps = 0.0;
  double t_end = 0.0;
  double dt = 0.0;
  double error = 0.0;
  double slope_floor = 0.0;
  double mass_drift = 0.0;
  double tail_frac = 0.0;
  double runtime_s = 0.0;
  std::string status = "ok"; // ok | aborted | degenerate
};

struct GateResult {
  std::string name;
  bool passed = true;
  std::string detail;
};

// Everything a finished study reports: the rows, the fitted rate (when one
// is meaningful), pass/fail gates, and enough provenance to reproduce the
// run (canonical config echo, its hash, the code version).
struct ConvergenceReport {
  std::string study;
  std::vector<StudyRow> rows;
  bool has_fit = false;
  RateFit fit;
  double slope_floor = 0.0;
  std::string status = "ok"; // ok | degenerate | gate_failure | aborted
  std::vector<GateResult> gates;
  std::vector<std::string> warnings;
  std::string config_echo;
  std::string config_hash;
  std::string version;
  bool timings = false;

  bool gates_passed() const {
    for (const GateResult& g : gates)
      if (!g.passed) return false;
    return true;
  }

  int exit_status() const {
    for (const StudyRow& r : rows)
      if (r.status == "aborted") return exit_code::numerical_abort;
    return gates_passed() ? exit_code::ok : exit_code::gate_failure;
  }
};

namespace detail {

inline void stamp_provenance(ConvergenceReport& rep, const ExperimentConfig& cfg) {
  rep.config_echo = cfg.canonical_text();
  rep.config_hash = cfg.hash_hex();
  rep.version = std::string(library_version);
  rep.timings = cfg.timings;
}

inline void finalize_status(ConvergenceReport& rep, bool degenerate) {
  bool any_aborted = false;
  for (const StudyRow& r : rep.rows)
    if (r.status == "aborted") any_aborted = true;
  if (any_aborted) rep.status = "aborted";
  else if (!rep.gates_passed()) rep.status = "gate_failure";
  else if (degenerate) rep.status = "degenerate";
  else rep.status = "ok";
}

class RowTimer {
public:
  RowTimer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

private:
  std::chrono::steady_clock::time_point start_;
};

inline std::string gate_detail(double measured, const char* relation, double bound) {
  return format_double(measured) + " " + relation + " " + format_double(bound);
}

// Deterministic "rough" sample data: unimodular coefficients with barely
// square-summable decay and phases drawn from an integer hash of the mode
// index. No random number generator anywhere, so every run sees the same
// field bit for bit.
inline Field rough_field(const SpectralGrid& g) {
  SpectralField c{g, std::vector<Complex>(g.size())};
  const int n1 = g.dim > 1 ? g.n : 1;
  const int n2 = g.dim > 2 ? g.n : 1;
  std::size_t idx = 0;
  for (int i0 = 0; i0 < g.n; ++i0) {
    for (int i1 = 0; i1 < n1; ++i1) {
      for (int i2 = 0; i2 < n2; ++i2, ++idx) {
        const double w0 = g.wavenumber(i0);
        const double w1 = g.dim > 1 ? g.wavenumber(i1) : 0.0;
        const double w2 = g.dim > 2 ? g.wavenumber(i2) : 0.0;
        const double xi2 = w0 * w0 + w1 * w1 + w2 * w2;
        const std::string key = std::to_string(g.mode_number(i0)) + "," +
                                (g.dim > 1 ? std::to_string(g.mode_number(i1)) : "") + "," +
                                (g.dim > 2 ? std::to_string(g.mode_number(i2)) : "");
        const std::uint64_t h = fnv1a64(key);
        const double phase = 2.0 * pi * (static_cast<double>(h >> 11) /
                                         static_cast<double>(1ULL << 53));
        const double mag = std::pow(1.0 + xi2, -0.5 * (0.5 * g.dim + 0.1));
        c.coefficients[idx] = mag * Complex{std::cos(phase), std::sin(phase)};
      }
    }
  }
  return inverse_transform(c);
}

inline Field propagator_data(const ExperimentConfig& cfg, const SpectralGrid& g) {
  Field base;
  if (cfg.data == "rough") {
    base = rough_field(g);
  } else {
    base = field_from_function(g, [](const std::array<double, 3>& x) {
      return std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]));
    });
  }
  // regularity-theta data: smoothed by the inverse Bessel multiplier
  return apply_multiplier(base, Multiplier::inhomogeneous_fractional(-cfg.theta));
}

} // namespace detail

// Deviation study: err(eps) = sup_{[0, t_end]} |Gamma_eps(0, t) - t|, which
// the closed form makes exactly (one-period extremum) * eps. The fitted
// slope is therefore 1 with R^2 = 1 up to rounding, and each row is checked
// against the extremum directly.
inline ConvergenceReport gamma_study(const ExperimentConfig& cfg) {
  ConvergenceReport rep;
  rep.study = "gamma";
  detail::stamp_provenance(rep, cfg);
  const DispersionMap map = cfg.map();
  rep.slope_floor = 1.0;

  for (double eps : cfg.eps) {
    detail::RowTimer timer;
    StudyRow row;
    row.eps = eps;
    row.t_end = cfg.t_end;
    row.slope_floor = rep.slope_floor;
    row.error = deviation_sup(map, eps, cfg.t_end, cfg.samples_per_period);
    row.runtime_s = timer.seconds();
    row.status = map.is_unit() ? "degenerate" : "ok";
    rep.rows.push_back(row);
  }

  if (map.is_unit()) {
    bool all_zero = true;
    for (const StudyRow& r : rep.rows) all_zero = all_zero && r.error == 0.0;
    rep.gates.push_back({"deviation_identically_zero", all_zero,
                         "unit map accumulates no deviation"});
    detail::finalize_status(rep, true);
    return rep;
  }

  const double extremum = deviation_sup(map, 1.0, 1.0, cfg.samples_per_period);
  bool scaling_ok = true;
  double worst_scaling = 0.0;
  for (const StudyRow& r : rep.rows) {
    const double rel = std::abs(r.error / (r.eps * extremum) - 1.0);
    worst_scaling = std::max(worst_scaling, rel);
    scaling_ok = scaling_ok && rel <= 1e-9;
  }
  rep.gates.push_back({"deviation_scales_exactly", scaling_ok,
                       "max relative gap to extremum*eps: " +
                           detail::gate_detail(worst_scaling, "<=", 1e-9)});

  std::vector<double> eps_v, err_v;
  for (const StudyRow& r : rep.rows) {
    eps_v.push_back(r.eps);
    err_v.push_back(r.error);
  }
  rep.fit = fit_rate(eps_v, err_v);
  rep.has_fit = true;
  rep.gates.push_back({"linear_in_eps",
                       std::abs(rep.fit.slope - 1.0) <= 0.005 && rep.fit.r_squared >= 0.999,
                       "slope " + detail::format_double(rep.fit.slope) + ", R^2 " +
                           detail::format_double(rep.fit.r_squared)});
  detail::finalize_status(rep, false);
  return rep;
}

// Linear flow comparison: mixed-norm distance between the managed and the
// plain free propagator on fixed filtered data, per eps.
inline ConvergenceReport propagator_study(const ExperimentConfig& cfg) {
  ConvergenceReport rep;
  rep.study = "propagator";
  detail::stamp_provenance(rep, cfg);
  const DispersionMap map = cfg.map();
  const AdmissiblePair pair = AdmissiblePair::checked(cfg.pair_q, cfg.pair_r, cfg.pair_dim);
  if (cfg.pair_dim != cfg.dim)
    rep.warnings.push_back("pair validated at d=" + std::to_string(cfg.pair_dim) +
                           ", field dimension " + std::to_string(cfg.dim));
  const SpectralGrid grid = SpectralGrid::make(cfg.dim, cfg.n, cfg.box);
  const Field phi = detail::propagator_data(cfg, grid);
  const double tail = spectral_tail_fraction(phi);
  rep.slope_floor = (1.0 - 2.0 / pair.q) * cfg.theta / 2.0;

  double ratio_min = std::numeric_limits<double>::infinity();
  double ratio_max = 0.0;
  for (double eps : cfg.eps) {
    detail::RowTimer timer;
    StudyRow row;
    row.eps = eps;
    row.t_end = cfg.t_end;
    row.slope_floor = rep.slope_floor;
    row.tail_frac = tail;
    const int n_t = default_time_samples(cfg.t_end, eps);
    row.error = propagator_difference_norm(phi, map, eps, pair, cfg.t_end, n_t);
    const double ratio = uniform_strichartz_ratio(phi, map, eps, pair, cfg.t_end, n_t);
    ratio_min = std::min(ratio_min, ratio);
    ratio_max = std::max(ratio_max, ratio);
    row.runtime_s = timer.seconds();
    row.status = map.is_unit() ? "degenerate" : "ok";
    rep.rows.push_back(row);
  }

  rep.gates.push_back({"uniform_dispersive_bound", ratio_max <= 2.0 * ratio_min,
                       "mixed-norm ratio range [" + detail::format_double(ratio_min) +
                           ", " + detail::format_double(ratio_max) + "]"});

  if (map.is_unit()) {
    bool all_zero = true;
    for (const StudyRow& r : rep.rows) all_zero = all_zero && r.error <= 1e-12;
    rep.gates.push_back({"flows_coincide", all_zero,
                         "unit map: managed and free flow agree to rounding"});
    detail::finalize_status(rep, true);
    return rep;
  }

  bool decreasing = true;
  for (std::size_t i = 1; i < rep.rows.size(); ++i)
    decreasing = decreasing && rep.rows[i].error < rep.rows[i - 1].error;
  rep.gates.push_back({"errors_strictly_decreasing", decreasing, "per smaller eps"});

  std::vector<double> eps_v, err_v;
  for (const StudyRow& r : rep.rows) {
    eps_v.push_back(r.eps);
    err_v.push_back(r.error);
  }
  rep.fit = fit_rate(eps_v, err_v);
  rep.has_fit = true;
  rep.gates.push_back({"slope_above_floor", rep.fit.slope >= 0.9 * rep.slope_floor,
                       detail::gate_detail(rep.fit.slope, ">=", 0.9 * rep.slope_floor)});
  rep.gates.push_back({"fit_quality", rep.fit.r_squared >= 0.9,
                       detail::gate_detail(rep.fit.r_squared, ">=", 0.9)});
  detail::finalize_status(rep, false);
  return rep;
}

namespace detail {

inline GroundState study_ground_state(const ExperimentConfig& cfg,
                                      const SpectralGrid& grid) {
  if (!cfg.ground_state_path.empty()) {
    GroundState gs = load_ground_state(cfg.ground_state_path);
    if (!(gs.profile.grid == grid))
      throw Mismatch("stored ground state grid does not match the study grid");
    return gs;
  }
  return petviashvili_solve(grid, default_ground_state_tol(cfg.dim));
}

} // namespace detail

// Averaging study: starts the managed equation on the soliton profile and
// measures the mixed-norm distance to the unmanaged orbit e^{it} Q over the
// slow horizon T_eps = a log(1/eps), capped at t_cap.
inline ConvergenceReport averaging_study(const ExperimentConfig& cfg) {
  ConvergenceReport rep;
  rep.study = "averaging";
  detail::stamp_provenance(rep, cfg);
  const DispersionMap map = cfg.map();
  const SpectralGrid grid = SpectralGrid::make(cfg.dim, cfg.n, cfg.box);
  const GroundState gs = detail::study_ground_state(cfg, grid);
  rep.slope_floor = 0.0; // any positive fitted rate certifies averaging

  for (double eps : cfg.eps) {
    detail::RowTimer timer;
    StudyRow row;
    row.eps = eps;
    row.t_end = std::min(cfg.horizon_coefficient() * std::log(1.0 / eps), cfg.t_cap);
    row.dt = std::min(cfg.dt_cap, cfg.dt_eps_fraction * eps);
    EvolveOptions opts;
    opts.dt = row.dt;
    opts.snapshot_stride = cfg.snapshot_stride;
    try {
      const Trajectory traj = evolve(gs.profile, 0.0, row.t_end, map, eps, opts);
      const Trajectory orbit = orbit_trajectory(gs, traj.times);
      row.error = trajectory_difference_norm(traj, orbit, cfg.norm_s);
      row.mass_drift = traj.mass_drift();
      row.tail_frac = traj.tail_frac_max;
      row.status = map.is_unit() ? "degenerate" : "ok";
      if (row.tail_frac > 1e-8)
        rep.warnings.push_back("spectral tail fraction " +
                               detail::format_double(row.tail_frac) + " at eps = " +
                               detail::format_double(eps));
    } catch (const AbortedRun& e) {
      row.error = std::numeric_limits<double>::quiet_NaN();
      row.status = "aborted";
      rep.warnings.push_back("run aborted at eps = " + detail::format_double(eps) +
                             ": " + e.what());
    }
    row.runtime_s = timer.seconds();
    rep.rows.push_back(row);
  }

  bool all_complete = true;
  for (const StudyRow& r : rep.rows) all_complete = all_complete && r.status != "aborted";
  rep.gates.push_back({"all_rows_complete", all_complete, "no aborted runs"});

  if (map.is_unit()) {
    bool tiny = true;
    for (const StudyRow& r : rep.rows) tiny = tiny && r.error <= 1e-6;
    rep.gates.push_back({"orbit_preserved", tiny,
                         "unit map: trajectory stays on the exact orbit"});
    detail::finalize_status(rep, true);
    return rep;
  }

  if (all_complete) {
    bool nonincreasing = true;
    for (std::size_t i = 1; i < rep.rows.size(); ++i)
      nonincreasing = nonincreasing &&
                      rep.rows[i].error <= rep.rows[i - 1].error * (1.0 + 1e-9);
    rep.gates.push_back({"errors_nonincreasing", nonincreasing, "per smaller eps"});

    std::vector<double> eps_v, err_v;
    for (const StudyRow& r : rep.rows) {
      eps_v.push_back(r.eps);
      err_v.push_back(r.error);
    }
    rep.fit = fit_rate(eps_v, err_v);
    rep.has_fit = true;
    rep.gates.push_back({"positive_rate", rep.fit.slope > 0.0,
                         detail::gate_detail(rep.fit.slope, ">", 0.0)});
    rep.gates.push_back({"fit_quality", rep.fit.r_squared >= 0.9,
                         detail::gate_detail(rep.fit.r_squared, ">=", 0.9)});
    rep.gates.push_back({"error_quartered",
                         rep.rows.back().error <= 0.25 * rep.rows.front().error,
                         detail::gate_detail(rep.rows.back().error, "<=",
                                             0.25 * rep.rows.front().error)});
  }
  detail::finalize_status(rep, false);
  return rep;
}

// Step-size refinement against a dt0/16 reference on the soliton orbit;
// second order splitting shows slope 2 in the fitted log-log rate.
inline ConvergenceReport order_study(const ExperimentConfig& cfg) {
  ConvergenceReport rep;
  rep.study = "order";
  detail::stamp_provenance(rep, cfg);
  const DispersionMap map = DispersionMap::unit();
  const SpectralGrid grid = SpectralGrid::make(cfg.dim, cfg.n, cfg.box);
  const GroundState gs = detail::study_ground_state(cfg, grid);
  rep.slope_floor = 2.0;

  auto final_state = [&](double dt) {
    EvolveOptions opts;
    opts.dt = dt;
    opts.snapshot_stride = 1 << 30; // endpoints only
    opts.nonlinear = !cfg.linear_only;
    return evolve(gs.profile, 0.0, cfg.t_end, map, 1.0, opts);
  };

  const Trajectory reference = final_state(cfg.order_dt0 / 16.0);
  double worst_drift = reference.mass_drift();
  for (double dt : {cfg.order_dt0, cfg.order_dt0 / 2.0, cfg.order_dt0 / 4.0}) {
    detail::RowTimer timer;
    StudyRow row;
    row.t_end = cfg.t_end;
    row.dt = dt;
    row.slope_floor = rep.slope_floor;
    const Trajectory traj = final_state(dt);
    row.error = l2_norm(traj.back() - reference.back());
    row.mass_drift = traj.mass_drift();
    worst_drift = std::max(worst_drift, row.mass_drift);
    row.tail_frac = traj.tail_frac_max;
    row.runtime_s = timer.seconds();
    row.status = cfg.linear_only ? "degenerate" : "ok";
    rep.rows.push_back(row);
  }

  rep.gates.push_back({"mass_preserved", worst_drift <= 1e-10,
                       detail::gate_detail(worst_drift, "<=", 1e-10)});

  if (cfg.linear_only) {
    bool exact = true;
    for (const StudyRow& r : rep.rows) exact = exact && r.error <= 1e-12;
    rep.gates.push_back({"exact_linear_integration", exact,
                         "linear steps compose the exact flow"});
    detail::finalize_status(rep, true);
    return rep;
  }

  std::vector<double> dt_v, err_v;
  for (const StudyRow& r : rep.rows) {
    dt_v.push_back(r.dt);
    err_v.push_back(r.error);
  }
  rep.fit = fit_rate(dt_v, err_v);
  rep.has_fit = true;
  rep.gates.push_back({"order_in_band",
                       rep.fit.slope >= 1.9 && rep.fit.slope <= 2.1,
                       detail::format_double(rep.fit.slope) + " in [1.9, 2.1]"});
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    const double ratio = rep.rows[i - 1].error / rep.rows[i].error;
    if (ratio < 3.0 || ratio > 5.5)
      rep.warnings.push_back("step sizes may be outside the asymptotic range: "
                             "halving gained factor " +
                             detail::format_double(ratio));
  }
  detail::finalize_status(rep, false);
  return rep;
}

inline ConvergenceReport run_study(const ExperimentConfig& cfg) {
  switch (cfg.kind) {
    case StudyKind::gamma: return gamma_study(cfg);
    case StudyKind::propagator: return propagator_study(cfg);
    case StudyKind::averaging: return averaging_study(cfg);
    case StudyKind::order: return order_study(cfg);
  }
  throw InvalidParameter("unknown study kind");
}

} // namespace dmnls
