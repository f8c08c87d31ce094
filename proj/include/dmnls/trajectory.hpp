#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "dmnls/grid.hpp"

namespace dmnls {

// A time-stamped sequence of field snapshots produced by an integrator (or
// assembled by hand, e.g. the exact soliton orbit). snapshots[i] is the state
// at times[i]; stamps are strictly monotone, increasing or decreasing.
struct Trajectory {
  SpectralGrid grid;
  std::vector<double> times;
  std::vector<Field> snapshots;

  // provenance, filled by the integrator
  double dt = 0.0;
  double eps = 1.0;
  std::string map_desc = "unit";
  int snapshot_stride = 1;
  bool nonlinear = true;

  // monitors, one entry per snapshot
  std::vector<double> mass_log;      // discrete squared L^2 norm
  double tail_frac_max = 0.0;        // worst top-octave spectral fraction seen

  std::size_t count() const { return snapshots.size(); }

  const Field& front() const { return snapshots.front(); }
  const Field& back() const { return snapshots.back(); }

  // Largest relative deviation of the mass log from its initial value.
  double mass_drift() const {
    if (mass_log.size() < 2) return 0.0;
    const double m0 = mass_log.front();
    if (m0 == 0.0) {
      double worst = 0.0;
      for (double m : mass_log) worst = std::max(worst, std::abs(m));
      return worst;
    }
    double worst = 0.0;
    for (double m : mass_log) worst = std::max(worst, std::abs(m - m0) / m0);
    return worst;
  }
};

inline void require_comparable(const Trajectory& a, const Trajectory& b,
                               const char* who) {
  if (!(a.grid == b.grid))
    throw Mismatch(std::string(who) + ": trajectories live on different grids");
  if (a.times.size() != b.times.size())
    throw Mismatch(std::string(who) + ": trajectories have different snapshot counts");
  for (std::size_t i = 0; i < a.times.size(); ++i)
    if (std::abs(a.times[i] - b.times[i]) > 1e-12 * std::max(1.0, std::abs(a.times[i])))
      throw Mismatch(std::string(who) + ": snapshot time stamps disagree at index " +
                     std::to_string(i));
}

} // namespace dmnls
