// Splitting integrator: exact invariants (mass, reversibility, linear-flow
// equivalence), convergence order, soliton fidelity, the integral-equation
// residual, and the four-term error decomposition.

#include <dmnls/evolution.hpp>
#include <dmnls/ground_state.hpp>
#include <dmnls/norms.hpp>
#include <dmnls/propagators.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "support.hpp"

using namespace dmnls;

namespace {

DispersionMap twopiece() {
  return DispersionMap::validate_admissible({{0.5, 3.0}, {0.5, -1.0}});
}

const GroundState& cached_soliton() {
  static const GroundState gs =
      petviashvili_solve(SpectralGrid::make(1, 512, 20.0), 1e-10);
  return gs;
}

} // namespace

TEST_CASE("Evolution rejects bad arguments", "[evolution]") {
  const SpectralGrid grid = SpectralGrid::make(1, 32, 4.0);
  const Field f = oracle::gaussian_data(grid);
  const DispersionMap unit = DispersionMap::unit();
  EvolveOptions opts;

  opts.dt = 0.0;
  CHECK_THROWS_AS(evolve(f, 0.0, 1.0, unit, 1.0, opts), InvalidParameter);
  opts.dt = -1e-3;
  CHECK_THROWS_AS(evolve(f, 0.0, 1.0, unit, 1.0, opts), InvalidParameter);
  opts.dt = 1e-2;
  opts.snapshot_stride = 0;
  CHECK_THROWS_AS(evolve(f, 0.0, 1.0, unit, 1.0, opts), InvalidParameter);
  opts.snapshot_stride = 1;
  CHECK_THROWS_AS(evolve(f, 0.5, 0.5, unit, 1.0, opts), DegenerateInterval);
  CHECK_THROWS_AS(evolve(f, 0.0, 1.0, unit, 0.0, opts), InvalidParameter);
  CHECK_THROWS_AS(evolve(f, 0.0, 1.0, unit, -2.0, opts), InvalidParameter);

  Field bad = f;
  bad.samples[5] = Complex{std::nan(""), 0.0};
  CHECK_THROWS_AS(evolve(bad, 0.0, 1.0, unit, 1.0, opts), InvalidField);
}

TEST_CASE("Zero data stays exactly zero", "[evolution]") {
  const SpectralGrid grid = SpectralGrid::make(1, 64, 4.0);
  EvolveOptions opts;
  opts.dt = 1e-2;
  const Trajectory traj =
      evolve(Field::zero(grid), 0.0, 1.0, twopiece(), 0.25, opts);
  CHECK(max_abs(traj.back()) == 0.0);
  CHECK(traj.mass_log.back() == 0.0);
}

TEST_CASE("Snapshot stamps cover the endpoints and stay monotone", "[evolution]") {
  const SpectralGrid grid = SpectralGrid::make(1, 64, 4.0);
  const Field f = oracle::gaussian_data(grid);
  EvolveOptions opts;
  opts.dt = 1e-2;
  opts.snapshot_stride = 7;
  // 0.55 is not a multiple of dt: the final step is shortened.
  const Trajectory traj = evolve(f, 0.2, 0.75, DispersionMap::unit(), 1.0, opts);
  CHECK(traj.times.front() == 0.2);
  CHECK(traj.times.back() == 0.75);
  for (std::size_t i = 1; i < traj.count(); ++i)
    CHECK(traj.times[i] > traj.times[i - 1]);
  CHECK(traj.map_desc == "unit");
  CHECK(traj.dt == opts.dt);
}

TEST_CASE("Both substeps are isometries so mass never drifts", "[evolution]") {
  const SpectralGrid grid = SpectralGrid::make(1, 256, 10.0);
  const Field f = support::random_field(grid, 7);
  EvolveOptions opts;
  opts.dt = 1e-3;
  opts.snapshot_stride = 50;
  const Trajectory traj = evolve(f, 0.0, 1.0, twopiece(), 0.125, opts);
  CHECK(traj.mass_drift() < 1e-12);
}

TEST_CASE("Linear-only evolution matches the closed-form propagator", "[evolution]") {
  const SpectralGrid grid = SpectralGrid::make(1, 128, 8.0);
  const Field f = oracle::gaussian_data(grid);
  const DispersionMap map = twopiece();
  EvolveOptions opts;
  opts.dt = 1e-3;
  opts.nonlinear = false;
  // With the cubic phase off every step applies the exact linear factor, and
  // those compose exactly by additivity of the accumulated dispersion.
  const Trajectory traj = evolve(f, 0.0, 1.0, map, 0.25, opts);
  const Field exact = dm_propagator(f, map, 0.25, 0.0, 1.0);
  CHECK(support::linf_diff(traj.back(), exact) < 1e-12);
}

TEST_CASE("Unit map evolution is independent of eps", "[evolution]") {
  // gamma identically one short-circuits the dispersion accumulation, so the
  // scale parameter cannot leak into the arithmetic at all.
  const SpectralGrid grid = SpectralGrid::make(1, 64, 5.0);
  const Field f = oracle::gaussian_data(grid);
  EvolveOptions opts;
  opts.dt = 2e-3;
  const Trajectory a = evolve(f, 0.0, 0.5, DispersionMap::unit(), 1.0, opts);
  const Trajectory b = evolve(f, 0.0, 0.5, DispersionMap::unit(), 0.015625, opts);
  REQUIRE(a.count() == b.count());
  for (std::size_t i = 0; i < a.snapshots.back().samples.size(); ++i)
    REQUIRE(a.snapshots.back().samples[i] == b.snapshots.back().samples[i]);
}

TEST_CASE("Stepping backward retraces the forward run", "[evolution]") {
  const SpectralGrid grid = SpectralGrid::make(1, 256, 10.0);
  const Field f = oracle::gaussian_data(grid);
  const DispersionMap map = twopiece();
  EvolveOptions opts;
  opts.dt = 1.0 / 1024.0; // divides the span exactly, so steps line up
  const Trajectory fwd = evolve(f, 0.0, 0.5, map, 0.25, opts);
  const Trajectory bwd = evolve(fwd.back(), 0.5, 0.0, map, 0.25, opts);
  CHECK(bwd.times.back() == 0.0);
  CHECK(support::linf_diff(bwd.back(), f) < 1e-10);
}

TEST_CASE("Self-convergence at second order", "[evolution]") {
  const SpectralGrid grid = SpectralGrid::make(1, 256, 10.0);
  const Field f = oracle::gaussian_data(grid);
  const DispersionMap unit = DispersionMap::unit();
  auto endpoint = [&](double dt) {
    EvolveOptions opts;
    opts.dt = dt;
    opts.snapshot_stride = 1 << 20; // endpoints only
    return evolve(f, 0.0, 0.5, unit, 1.0, opts).back();
  };
  const Field ref = endpoint(1.25e-4);
  const double coarse = support::linf_diff(endpoint(2e-3), ref);
  const double fine = support::linf_diff(endpoint(1e-3), ref);
  // Strang splitting: halving dt divides the error by four.
  CHECK(coarse / fine == Catch::Approx(4.0).margin(0.7));
}

TEST_CASE("Soliton data follows the exact orbit", "[evolution]") {
  const GroundState& gs = cached_soliton();
  EvolveOptions opts; // stock step size, the one the fidelity claim is about
  opts.snapshot_stride = 1000;
  const Trajectory traj =
      evolve(gs.profile, 0.0, 10.0, DispersionMap::unit(), 1.0, opts);
  CHECK(traj.mass_drift() < 1e-11);
  double worst = 0.0;
  for (std::size_t i = 0; i < traj.count(); ++i)
    worst = std::max(worst, support::linf_diff(traj.snapshots[i],
                                               soliton_orbit(gs, traj.times[i])));
  CHECK(worst < 1e-5);
}

TEST_CASE("Recorded trajectories satisfy their integral equation", "[evolution]") {
  const GroundState& gs = cached_soliton();
  const DispersionMap unit = DispersionMap::unit();
  EvolveOptions opts;
  opts.dt = 1e-3;
  opts.snapshot_stride = 2;
  const Trajectory traj = evolve(gs.profile, 0.0, 2.0, unit, 1.0, opts);

  const double fine = duhamel_residual(traj, unit, 1.0, 1200);
  const double coarse = duhamel_residual(traj, unit, 1.0, 60);
  CHECK(fine < 1e-4);
  CHECK(fine <= coarse + 1e-12);

  // Negative control: a tampered snapshot must be flagged, otherwise the
  // residual would certify nothing.
  Trajectory bad = traj;
  const std::size_t mid = bad.count() / 2;
  bad.snapshots[mid] = Complex{1.02, 0.0} * bad.snapshots[mid];
  CHECK(duhamel_residual(bad, unit, 1.0, 1200) > 1e-3);
}

TEST_CASE("Linear runs satisfy the integral equation to roundoff", "[evolution]") {
  const SpectralGrid grid = SpectralGrid::make(1, 128, 8.0);
  const Field f = oracle::gaussian_data(grid);
  const DispersionMap map = twopiece();
  EvolveOptions opts;
  opts.dt = 1e-3;
  opts.nonlinear = false;
  const Trajectory traj = evolve(f, 0.0, 1.0, map, 0.25, opts);
  CHECK(duhamel_residual(traj, map, 0.25) < 1e-10);
}

TEST_CASE("Integral-equation residual rejects degenerate input", "[evolution]") {
  const SpectralGrid grid = SpectralGrid::make(1, 32, 4.0);
  Trajectory traj;
  traj.grid = grid;
  traj.times = {0.0};
  traj.snapshots = {oracle::gaussian_data(grid)};
  CHECK_THROWS_AS(duhamel_residual(traj, DispersionMap::unit(), 1.0),
                  DegenerateInterval);
  traj.times = {0.0, 0.5};
  traj.snapshots.push_back(traj.snapshots.front());
  CHECK_THROWS_AS(duhamel_residual(traj, DispersionMap::unit(), 1.0, 1),
                  InvalidParameter);
}

TEST_CASE("Error decomposition vanishes identically for identical runs", "[evolution]") {
  // Against the unit map every propagator defect factor is exactly zero and
  // the state differences are differences of identical vectors.
  const SpectralGrid grid = SpectralGrid::make(1, 64, 5.0);
  const Field f = oracle::gaussian_data(grid);
  EvolveOptions opts;
  opts.dt = 1e-2;
  const Trajectory traj = evolve(f, 0.0, 1.0, DispersionMap::unit(), 1.0, opts);
  const DecompositionDiagnostics d = decomposition_diagnostics(
      traj, traj, 0.0, 1.0, DispersionMap::unit(), 1.0);
  CHECK(d.initial_term == 0.0);
  CHECK(d.linear_defect_term == 0.0);
  CHECK(d.nonlinear_term == 0.0);
  CHECK(d.forcing_defect_term == 0.0);
  CHECK(d.reconstruction_mismatch == 0.0);
}

TEST_CASE("Error decomposition reconstructs the endpoint difference", "[evolution]") {
  const GroundState& gs = cached_soliton();
  const DispersionMap map = twopiece();
  const double eps = 0.25;
  EvolveOptions opts;
  opts.dt = 2.5e-4;
  opts.snapshot_stride = 4;
  const Trajectory managed = evolve(gs.profile, 0.0, 1.0, map, eps, opts);
  const Trajectory plain =
      evolve(gs.profile, 0.0, 1.0, DispersionMap::unit(), 1.0, opts);

  const DecompositionDiagnostics fine =
      decomposition_diagnostics(managed, plain, 0.0, 1.0, map, eps, 1);
  CHECK(fine.initial_term == 0.0); // same data in both runs
  CHECK(fine.reconstruction_mismatch < 1e-3);

  const DecompositionDiagnostics coarse =
      decomposition_diagnostics(managed, plain, 0.0, 1.0, map, eps, 8);
  CHECK(fine.reconstruction_mismatch <= coarse.reconstruction_mismatch + 1e-12);
  CHECK(fine.quadrature_nodes > coarse.quadrature_nodes);
}

TEST_CASE("Error decomposition rejects bad windows", "[evolution]") {
  const SpectralGrid grid = SpectralGrid::make(1, 32, 4.0);
  const Field f = oracle::gaussian_data(grid);
  EvolveOptions opts;
  opts.dt = 1e-2;
  const Trajectory traj = evolve(f, 0.0, 1.0, DispersionMap::unit(), 1.0, opts);
  const DispersionMap unit = DispersionMap::unit();
  CHECK_THROWS_AS(decomposition_diagnostics(traj, traj, 0.0, 0.123456, unit, 1.0),
                  Mismatch);
  CHECK_THROWS_AS(decomposition_diagnostics(traj, traj, 1.0, 1.0, unit, 1.0),
                  DegenerateInterval);
  CHECK_THROWS_AS(decomposition_diagnostics(traj, traj, 0.0, 1.0, unit, 1.0, 0),
                  InvalidParameter);
}

TEST_CASE("Runs abort cleanly instead of emitting garbage", "[evolution]") {
  const SpectralGrid grid = SpectralGrid::make(1, 32, 4.0);
  EvolveOptions opts;
  opts.dt = 1e-2;

  // Overflowing data turns the cubic phase into NaN; the first monitored
  // snapshot catches it.
  const Field huge = field_from_function(grid, [](const std::array<double, 3>& x) {
    return Complex{1e200 * std::exp(-x[0] * x[0]), 0.0};
  });
  CHECK_THROWS_AS(evolve(huge, 0.0, 0.1, DispersionMap::unit(), 1.0, opts),
                  AbortedRun);

  // An absurdly tight drift threshold trips on the first roundoff wiggle and
  // reports the last trustworthy stamp.
  const Field f = oracle::gaussian_data(grid);
  opts.snapshot_stride = 1;
  opts.mass_drift_abort = 1e-300;
  try {
    evolve(f, 0.0, 1.0, DispersionMap::unit(), 1.0, opts);
    FAIL("drift threshold never tripped");
  } catch (const AbortedRun& e) {
    CHECK(e.last_good_time >= 0.0);
    CHECK(e.last_good_time < 1.0);
  }
}
