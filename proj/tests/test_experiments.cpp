// Study drivers and the rate fit: synthetic data with known slopes, the four
// study kinds at desk scale, degenerate configurations, and byte-level
// determinism of the emitted reports.

#include <dmnls/experiments.hpp>
#include <dmnls/report_io.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>
#include <vector>

using namespace dmnls;

namespace {

std::vector<double> dyadic(int first, int last) {
  std::vector<double> out;
  for (int k = first; k <= last; ++k) out.push_back(std::pow(2.0, -k));
  return out;
}

ExperimentConfig base_config(StudyKind kind) {
  ExperimentConfig cfg;
  cfg.kind = kind;
  cfg.dim = 1;
  cfg.n = 256;
  cfg.box = 20.0;
  return cfg;
}

} // namespace

TEST_CASE("Rate fit recovers synthetic power laws", "[experiments]") {
  const std::vector<double> eps = {0.25, 0.125, 0.0625, 0.03125};

  std::vector<double> linear, half, flat;
  for (double e : eps) {
    linear.push_back(e);
    half.push_back(5.0 * std::sqrt(e));
    flat.push_back(0.75);
  }

  const RateFit f1 = fit_rate(eps, linear);
  CHECK(f1.slope == Catch::Approx(1.0).margin(1e-12));
  CHECK(f1.intercept == Catch::Approx(0.0).margin(1e-12));
  CHECK(f1.r_squared >= 1.0 - 1e-12);
  CHECK(f1.jackknife_spread < 1e-10);
  CHECK(f1.points == 4);

  const RateFit f2 = fit_rate(eps, half);
  CHECK(f2.slope == Catch::Approx(0.5).margin(1e-12));
  CHECK(f2.intercept == Catch::Approx(std::log(5.0)).margin(1e-12));

  const RateFit f3 = fit_rate(eps, flat);
  CHECK(f3.slope == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("Rate fit flags unusable samples", "[experiments]") {
  CHECK_THROWS_AS(fit_rate({0.5, 0.25}, {1.0, 0.5}), DegenerateInterval);
  CHECK_THROWS_AS(fit_rate({0.5, 0.25, 0.125}, {1.0, 0.5}), Mismatch);
  CHECK_THROWS_AS(fit_rate({0.5, 0.25, -0.125}, {1.0, 0.5, 0.25}), InvalidParameter);
  CHECK_THROWS_AS(fit_rate({0.5, 0.25, 0.125}, {1.0, 0.0, 0.25}), InvalidParameter);
}

TEST_CASE("Jackknife spread reacts to scatter", "[experiments]") {
  const std::vector<double> eps = {0.5, 0.25, 0.125, 0.0625, 0.03125};
  std::vector<double> noisy;
  for (std::size_t i = 0; i < eps.size(); ++i)
    noisy.push_back(eps[i] * (i % 2 == 0 ? 1.1 : 0.9));
  const RateFit fit = fit_rate(eps, noisy);
  CHECK(fit.jackknife_spread > 1e-4);
  CHECK(fit.jackknife_spread < 0.15);
}

TEST_CASE("Deviation study measures the exact linear scaling", "[experiments]") {
  ExperimentConfig cfg = base_config(StudyKind::gamma);
  cfg.segments = {{0.5, 3.0}, {0.5, -1.0}};
  cfg.eps = dyadic(2, 6);
  cfg.t_end = 10.0;

  const ConvergenceReport rep = gamma_study(cfg);
  CHECK(rep.study == "gamma");
  CHECK(rep.status == "ok");
  CHECK(rep.gates_passed());
  CHECK(rep.exit_status() == exit_code::ok);
  REQUIRE(rep.has_fit);
  CHECK(rep.fit.slope == Catch::Approx(1.0).margin(1e-6));
  CHECK(rep.fit.r_squared >= 0.999);
  // two-piece extremum is 1, so each row reads the scale directly
  for (const StudyRow& r : rep.rows)
    CHECK(r.error == Catch::Approx(r.eps).epsilon(1e-9));
}

TEST_CASE("Deviation study on a three-piece profile", "[experiments]") {
  ExperimentConfig cfg = base_config(StudyKind::gamma);
  cfg.segments = {{0.375, 2.0}, {0.375, 2.0}, {0.25, -2.0}};
  cfg.eps = dyadic(2, 5);
  cfg.t_end = 4.0;
  const ConvergenceReport rep = gamma_study(cfg);
  CHECK(rep.gates_passed());
  for (const StudyRow& r : rep.rows)
    CHECK(r.error == Catch::Approx(0.75 * r.eps).epsilon(1e-9));
}

TEST_CASE("Deviation study degenerates gracefully on the unit map", "[experiments]") {
  ExperimentConfig cfg = base_config(StudyKind::gamma);
  cfg.eps = dyadic(2, 4);
  const ConvergenceReport rep = gamma_study(cfg);
  CHECK(rep.status == "degenerate");
  CHECK_FALSE(rep.has_fit);
  CHECK(rep.gates_passed());
  for (const StudyRow& r : rep.rows) {
    CHECK(r.error == 0.0);
    CHECK(r.status == "degenerate");
  }
}

TEST_CASE("Linear flow study shrinks with the management scale", "[experiments]") {
  ExperimentConfig cfg = base_config(StudyKind::propagator);
  cfg.n = 128;
  cfg.box = 10.0;
  cfg.segments = {{0.5, 3.0}, {0.5, -1.0}};
  cfg.eps = dyadic(2, 4);
  cfg.t_end = 1.0;
  cfg.theta = 0.5;

  const ConvergenceReport rep = propagator_study(cfg);
  CHECK(rep.status == "ok");
  CHECK(rep.gates_passed());
  // (1 - 2/q) theta / 2 at q = 10/3, theta = 1/2
  CHECK(rep.slope_floor == Catch::Approx(0.1).margin(1e-12));
  REQUIRE(rep.has_fit);
  CHECK(rep.fit.slope >= 0.09);
  // pair admissibility was checked at d = 3 while the field lives in d = 1
  REQUIRE_FALSE(rep.warnings.empty());
  CHECK(rep.warnings.front().find("pair validated") != std::string::npos);
}

TEST_CASE("Endpoint pair pushes the floor to theta over two", "[experiments]") {
  ExperimentConfig cfg = base_config(StudyKind::propagator);
  cfg.n = 128;
  cfg.box = 10.0;
  cfg.segments = {{0.5, 3.0}, {0.5, -1.0}};
  cfg.eps = dyadic(2, 4);
  cfg.theta = 0.8;
  cfg.pair_q = infinite_exponent;
  cfg.pair_r = 2.0;
  cfg.pair_dim = 1;
  const ConvergenceReport rep = propagator_study(cfg);
  CHECK(rep.slope_floor == Catch::Approx(0.4).margin(1e-12));
  CHECK(rep.warnings.empty());
}

TEST_CASE("Linear flow study degenerates gracefully on the unit map", "[experiments]") {
  ExperimentConfig cfg = base_config(StudyKind::propagator);
  cfg.n = 64;
  cfg.box = 10.0;
  cfg.eps = dyadic(2, 4);
  const ConvergenceReport rep = propagator_study(cfg);
  CHECK(rep.status == "degenerate");
  CHECK(rep.gates_passed());
  for (const StudyRow& r : rep.rows) CHECK(r.error <= 1e-12);
}

TEST_CASE("Deterministic rough data is reproducible bit for bit", "[experiments]") {
  const SpectralGrid grid = SpectralGrid::make(1, 64, 8.0);
  const Field a = detail::rough_field(grid);
  const Field b = detail::rough_field(grid);
  for (std::size_t i = 0; i < a.samples.size(); ++i)
    REQUIRE(a.samples[i] == b.samples[i]);
  // barely square summable: mass finite, visible content in the top octave
  CHECK(std::isfinite(l2_norm(a)));
  CHECK(spectral_tail_fraction(a) > 1e-3);
}

TEST_CASE("Averaging study stays on the orbit for the unit map", "[experiments]") {
  ExperimentConfig cfg = base_config(StudyKind::averaging);
  cfg.eps = {0.5, 0.25};
  cfg.dt_cap = 2e-4;
  const ConvergenceReport rep = averaging_study(cfg);
  CHECK(rep.status == "degenerate");
  CHECK(rep.gates_passed());
  CHECK_FALSE(rep.has_fit);
  for (const StudyRow& r : rep.rows) CHECK(r.error <= 1e-6);
}

TEST_CASE("Averaging study converges on a managed one-dimensional run", "[experiments]") {
  ExperimentConfig cfg = base_config(StudyKind::averaging);
  cfg.segments = {{0.5, 3.0}, {0.5, -1.0}};
  cfg.eps = dyadic(2, 5);
  cfg.horizon_a = 1.0;

  const ConvergenceReport rep = averaging_study(cfg);
  CHECK(rep.status == "ok");
  CHECK(rep.gates_passed());
  REQUIRE(rep.has_fit);
  CHECK(rep.fit.slope > 0.5);
  CHECK(rep.fit.slope < 1.5);
  CHECK(rep.fit.r_squared >= 0.9);
  for (const StudyRow& r : rep.rows) {
    CHECK(r.mass_drift < 1e-10);
    CHECK(r.t_end == Catch::Approx(std::log(1.0 / r.eps)));
  }
}

TEST_CASE("Averaging horizon respects the cap", "[experiments]") {
  ExperimentConfig cfg = base_config(StudyKind::averaging);
  cfg.segments = {{0.5, 3.0}, {0.5, -1.0}};
  cfg.eps = {0.25, 0.125, 0.0625};
  cfg.horizon_a = 1.0;
  cfg.t_cap = 1.5;
  const ConvergenceReport rep = averaging_study(cfg);
  for (const StudyRow& r : rep.rows) CHECK(r.t_end <= 1.5);
}

TEST_CASE("Step refinement study sits at second order", "[experiments]") {
  ExperimentConfig cfg = base_config(StudyKind::order);
  cfg.t_end = 1.0;
  cfg.order_dt0 = 4e-3;
  const ConvergenceReport rep = order_study(cfg);
  CHECK(rep.status == "ok");
  CHECK(rep.gates_passed());
  REQUIRE(rep.has_fit);
  CHECK(rep.fit.slope >= 1.9);
  CHECK(rep.fit.slope <= 2.1);
  for (const StudyRow& r : rep.rows) CHECK(r.mass_drift <= 1e-10);
}

TEST_CASE("Step refinement warns outside the asymptotic range", "[experiments]") {
  // dt = 2 rotates the nonlinear phase by several radians per step, so the
  // error saturates near the orbit diameter and halving recovers well under
  // the factor-four band.
  ExperimentConfig cfg = base_config(StudyKind::order);
  cfg.t_end = 2.0;
  cfg.order_dt0 = 2.0;
  const ConvergenceReport rep = order_study(cfg);
  CHECK_FALSE(rep.warnings.empty());
  CHECK_FALSE(rep.gates_passed());
}

TEST_CASE("Linear-only step refinement is exact", "[experiments]") {
  ExperimentConfig cfg = base_config(StudyKind::order);
  cfg.linear_only = true;
  cfg.t_end = 1.0;
  const ConvergenceReport rep = order_study(cfg);
  CHECK(rep.status == "degenerate");
  CHECK(rep.gates_passed());
  CHECK_FALSE(rep.has_fit);
  for (const StudyRow& r : rep.rows) CHECK(r.error <= 1e-12);
}

TEST_CASE("Study dispatch honors the configured kind", "[experiments]") {
  ExperimentConfig cfg = base_config(StudyKind::gamma);
  cfg.segments = {{0.5, 3.0}, {0.5, -1.0}};
  cfg.eps = dyadic(2, 4);
  CHECK(run_study(cfg).study == "gamma");
}

TEST_CASE("Reruns of one config emit byte-identical reports", "[experiments]") {
  ExperimentConfig cfg = base_config(StudyKind::averaging);
  cfg.segments = {{0.5, 3.0}, {0.5, -1.0}};
  cfg.eps = dyadic(2, 4);
  cfg.horizon_a = 1.0;

  const ConvergenceReport a = averaging_study(cfg);
  const ConvergenceReport b = averaging_study(cfg);
  CHECK(report_csv_text(a) == report_csv_text(b));
  CHECK(report_json(a).dump(2) == report_json(b).dump(2));
  CHECK(a.config_hash == b.config_hash);
}

TEST_CASE("Config hash tracks semantic changes only", "[experiments]") {
  ExperimentConfig a = base_config(StudyKind::gamma);
  a.segments = {{0.5, 3.0}, {0.5, -1.0}};
  a.eps = dyadic(2, 4);
  ExperimentConfig b = a;
  CHECK(a.hash_hex() == b.hash_hex());
  b.t_end = 2.0;
  CHECK(a.hash_hex() != b.hash_hex());
}

TEST_CASE("Gate failures map onto process exit codes", "[experiments]") {
  ConvergenceReport rep;
  rep.gates.push_back({"demo", true, ""});
  CHECK(rep.exit_status() == exit_code::ok);
  rep.gates.push_back({"demo2", false, ""});
  CHECK(rep.exit_status() == exit_code::gate_failure);
  StudyRow row;
  row.status = "aborted";
  rep.rows.push_back(row);
  CHECK(rep.exit_status() == exit_code::numerical_abort);
}
