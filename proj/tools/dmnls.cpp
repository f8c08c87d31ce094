// Command line front end: ground-state solves, convergence studies driven by
// config files, and single trajectory runs with on-disk snapshots.

#include <clocale>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dmnls/dmnls.hpp"

namespace {

using namespace dmnls;

template <class Fn>
int run_guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return exit_code::usage;
  } catch (const MapRejected& e) {
    std::fprintf(stderr, "map rejected (%s): %s\n", e.condition.c_str(), e.what());
    return exit_code::usage;
  } catch (const InvalidParameter& e) {
    std::fprintf(stderr, "invalid parameter: %s\n", e.what());
    return exit_code::usage;
  } catch (const InvalidField& e) {
    std::fprintf(stderr, "invalid field: %s\n", e.what());
    return exit_code::usage;
  } catch (const Mismatch& e) {
    std::fprintf(stderr, "mismatch: %s\n", e.what());
    return exit_code::usage;
  } catch (const DegenerateInterval& e) {
    std::fprintf(stderr, "degenerate request: %s\n", e.what());
    return exit_code::usage;
  } catch (const Divergence& e) {
    std::fprintf(stderr, "did not converge: %s (last residual %.3g)\n", e.what(),
                 e.last_residual);
    return exit_code::numerical_abort;
  } catch (const AbortedRun& e) {
    std::fprintf(stderr, "run aborted: %s\n", e.what());
    return exit_code::numerical_abort;
  } catch (const NumericalFailure& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return exit_code::numerical_abort;
  } catch (const IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return exit_code::io_failure;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code::gate_failure;
  }
}

struct GroundStateArgs {
  int dim = 1;
  int n = 512;
  double box = 20.0;
  double tol = 0.0; // 0 means pick by dimension
  int max_iter = 500;
  std::string out;
};

int cmd_ground_state(const GroundStateArgs& a) {
  return run_guarded([&] {
    const double tol = a.tol > 0.0 ? a.tol : default_ground_state_tol(a.dim);
    const SpectralGrid grid = SpectralGrid::make(a.dim, a.n, a.box);
    std::printf("ground state: d=%d n=%d box=%g tol=%.3g\n", a.dim, a.n, a.box, tol);
    const GroundState gs = petviashvili_solve(grid, tol, a.max_iter);
    const IdentityResiduals ids = certify_identities(gs);
    std::printf("  converged in %d iterations: residual %.3g, stabilizer gap %.3g\n",
                gs.iterations, gs.residual, gs.stabilizer_gap);
    std::printf("  mass %.12g, identity residuals %.3g / %.3g\n", gs.mass, ids.pairing,
                ids.pohozaev);
    write_ground_state(a.out, gs);
    std::printf("  wrote %s (+ sidecar)\n", a.out.c_str());
    return exit_code::ok;
  });
}

struct StudyArgs {
  std::string config;
  std::string out_dir_override;
};

int cmd_study(const StudyArgs& a) {
  return run_guarded([&] {
    ExperimentConfig cfg = ExperimentConfig::parse_file(a.config);
    if (!a.out_dir_override.empty()) cfg.out_dir = a.out_dir_override;
    if (cfg.out_dir.empty()) cfg.out_dir = "runs/" + study_name(cfg.kind);
    std::printf("study %s (config %s)\n", study_name(cfg.kind).c_str(),
                cfg.hash_hex().c_str());
    const ConvergenceReport rep = run_study(cfg);
    for (const StudyRow& r : rep.rows)
      std::printf("  eps %-12g T %-8g dt %-10g error %-14.6g %s\n", r.eps, r.t_end,
                  r.dt, r.error, r.status.c_str());
    if (rep.has_fit)
      std::printf("  fit: slope %.6f, R^2 %.6f, jackknife spread %.3g\n", rep.fit.slope,
                  rep.fit.r_squared, rep.fit.jackknife_spread);
    for (const GateResult& g : rep.gates)
      std::printf("  gate %-28s %s  (%s)\n", g.name.c_str(),
                  g.passed ? "pass" : "FAIL", g.detail.c_str());
    for (const std::string& w : rep.warnings)
      std::printf("  warning: %s\n", w.c_str());
    write_report_bundle(rep, cfg.out_dir);
    std::printf("  wrote %s/%s.{csv,json,svg}\n", cfg.out_dir.c_str(),
                rep.study.c_str());
    std::printf("status: %s\n", rep.status.c_str());
    return rep.exit_status();
  });
}

struct EvolveArgs {
  std::string init = "soliton";
  std::string map = "unit";
  double eps = 1.0;
  double t0 = 0.0;
  double t1 = 1.0;
  double dt = 0.0; // 0 means min(1e-2, eps/4)
  int dim = 1;
  int n = 512;
  double box = 20.0;
  int stride = 10;
  bool linear_only = false;
  std::string out_dir;
};

int cmd_evolve(const EvolveArgs& a) {
  return run_guarded([&] {
    const auto segments = parse_map_spec(a.map);
    const DispersionMap map = segments.empty()
                                  ? DispersionMap::unit()
                                  : DispersionMap::validate_admissible(segments);
    Field u0;
    bool have_orbit = false;
    GroundState gs;
    if (a.init == "soliton") {
      const SpectralGrid grid = SpectralGrid::make(a.dim, a.n, a.box);
      gs = petviashvili_solve(grid, default_ground_state_tol(a.dim));
      u0 = gs.profile;
      have_orbit = true;
    } else {
      auto [field, meta] = read_field(a.init);
      u0 = std::move(field);
    }

    EvolveOptions opts;
    opts.dt = a.dt > 0.0 ? a.dt : std::min(1e-2, 0.25 * a.eps);
    opts.snapshot_stride = a.stride;
    opts.nonlinear = !a.linear_only;
    std::printf("evolve: map %s, eps %g, t %g -> %g, dt %g%s\n", map.describe().c_str(),
                a.eps, a.t0, a.t1, opts.dt, opts.nonlinear ? "" : " (linear only)");

    const Trajectory traj = evolve(u0, a.t0, a.t1, map, a.eps, opts);
    std::printf("  %zu snapshots, mass drift %.3g, tail fraction %.3g\n", traj.count(),
                traj.mass_drift(), traj.tail_frac_max);
    if (have_orbit) {
      const Trajectory orbit = orbit_trajectory(gs, traj.times);
      std::printf("  distance to orbit: final L2 %.6g, S^1/2 %.6g\n",
                  l2_norm(traj.back() - orbit.back()),
                  trajectory_difference_norm(traj, orbit, 0.5));
    }
    if (!a.out_dir.empty()) {
      write_trajectory(a.out_dir, traj);
      std::printf("  wrote trajectory to %s\n", a.out_dir.c_str());
    }
    return exit_code::ok;
  });
}

} // namespace

int main(int argc, char** argv) {
  std::setlocale(LC_ALL, "C");

  CLI::App app{"dispersion-managed cubic Schrodinger toolbox"};
  app.set_version_flag("--version", std::string(dmnls::library_version));
  app.require_subcommand(1);

  GroundStateArgs gs_args;
  CLI::App* gs_cmd = app.add_subcommand("ground-state", "solve for the soliton profile");
  gs_cmd->add_option("--dim", gs_args.dim, "space dimension (1-3)");
  gs_cmd->add_option("--n", gs_args.n, "grid points per axis");
  gs_cmd->add_option("--box", gs_args.box, "box half-width L");
  gs_cmd->add_option("--tol", gs_args.tol, "convergence tolerance (default by dim)");
  gs_cmd->add_option("--max-iter", gs_args.max_iter, "iteration budget");
  gs_cmd->add_option("--out", gs_args.out, "output .fld path")->required();

  StudyArgs study_args;
  CLI::App* study_cmd = app.add_subcommand("study", "run a convergence study");
  study_cmd->add_option("--config", study_args.config, "config file path")->required();
  study_cmd->add_option("--out-dir", study_args.out_dir_override,
                        "override the config's output directory");

  EvolveArgs ev_args;
  CLI::App* ev_cmd = app.add_subcommand("evolve", "integrate one trajectory");
  ev_cmd->add_option("--init", ev_args.init, "'soliton' or a .fld file");
  ev_cmd->add_option("--map", ev_args.map,
                     "unit | twopiece | symmetric3 | l:v,l:v | @file");
  ev_cmd->add_option("--eps", ev_args.eps, "management period")->required();
  ev_cmd->add_option("--t0", ev_args.t0, "start time");
  ev_cmd->add_option("--t1", ev_args.t1, "end time")->required();
  ev_cmd->add_option("--dt", ev_args.dt, "step size (default min(1e-2, eps/4))");
  ev_cmd->add_option("--dim", ev_args.dim, "grid dimension for soliton init");
  ev_cmd->add_option("--n", ev_args.n, "grid points per axis for soliton init");
  ev_cmd->add_option("--box", ev_args.box, "box half-width for soliton init");
  ev_cmd->add_option("--stride", ev_args.stride, "snapshot stride");
  ev_cmd->add_flag("--linear-only", ev_args.linear_only, "drop the cubic term");
  ev_cmd->add_option("--out-dir", ev_args.out_dir, "write trajectory snapshots here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : dmnls::exit_code::usage;
  }

  if (gs_cmd->parsed()) return cmd_ground_state(gs_args);
  if (study_cmd->parsed()) return cmd_study(study_args);
  if (ev_cmd->parsed()) return cmd_evolve(ev_args);
  return dmnls::exit_code::usage;
}
