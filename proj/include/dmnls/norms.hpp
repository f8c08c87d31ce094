#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "dmnls/fft.hpp"
#include "dmnls/grid.hpp"
#include "dmnls/multipliers.hpp"
#include "dmnls/trajectory.hpp"

namespace dmnls {

inline constexpr double infinite_exponent = std::numeric_limits<double>::infinity();

// Discrete L^r norm: (h^d sum |f_j|^r)^{1/r}, with r = inf the sample max.
inline double lebesgue_norm(const Field& f, double r) {
  require_valid(f, "lebesgue norm");
  if (r == infinite_exponent) return max_abs(f);
  if (!(r >= 1.0))
    throw InvalidParameter("lebesgue exponent must be >= 1 or infinite");
  if (r == 2.0) return l2_norm(f);
  double acc = 0.0;
  for (const Complex& z : f.samples) acc += std::pow(std::abs(z), r);
  return std::pow(acc * f.grid.cell_volume(), 1.0 / r);
}

// Sobolev norm ||f||_{L^r} + || |grad|^s f ||_{L^r}. The fractional
// derivative is the diagonal multiplier |xi|^s, so s = 0 returns twice the
// Lebesgue norm.
inline double sobolev_norm(const Field& f, double s, double r) {
  const Multiplier d = Multiplier::homogeneous_fractional(s);
  return lebesgue_norm(f, r) + lebesgue_norm(apply_multiplier(f, d), r);
}

namespace detail {

inline void require_quadrature_ready(const Trajectory& u, const char* who) {
  if (u.count() < 2)
    throw DegenerateInterval(std::string(who) + ": need at least two snapshots");
  if (u.times.size() != u.snapshots.size())
    throw Mismatch(std::string(who) + ": stamp and snapshot counts differ");
  const bool increasing = u.times[1] > u.times[0];
  for (std::size_t i = 1; i < u.times.size(); ++i) {
    const bool step_up = u.times[i] > u.times[i - 1];
    if (step_up != increasing || u.times[i] == u.times[i - 1])
      throw DegenerateInterval(std::string(who) + ": time stamps must be strictly monotone");
  }
}

// Composite trapezoid of g(t)^q over the snapshot stamps, then the 1/q root;
// q = inf is the max over samples. Orientation of the stamps is irrelevant.
template <class G>
double time_lebesgue(const Trajectory& u, double q, G&& g) {
  if (q == infinite_exponent) {
    double worst = 0.0;
    for (std::size_t i = 0; i < u.count(); ++i) worst = std::max(worst, g(i));
    return worst;
  }
  if (!(q >= 1.0))
    throw InvalidParameter("time exponent must be >= 1 or infinite");
  double prev = std::pow(g(0), q);
  double acc = 0.0;
  for (std::size_t i = 1; i < u.count(); ++i) {
    const double cur = std::pow(g(i), q);
    acc += 0.5 * (prev + cur) * std::abs(u.times[i] - u.times[i - 1]);
    prev = cur;
  }
  return std::pow(acc, 1.0 / q);
}

} // namespace detail

// L^q in time of the spatial Sobolev norm H^{s,r} over the trajectory's span.
inline double time_sobolev_norm(const Trajectory& u, double s, double q, double r) {
  detail::require_quadrature_ready(u, "time Sobolev norm");
  return detail::time_lebesgue(u, q, [&](std::size_t i) {
    return sobolev_norm(u.snapshots[i], s, r);
  });
}

// The mixed dispersive norm used by every error study:
//
//   ||u||_{S^s} = ||u||_{L^inf_t H^s} + ||u||_{L^{10/3}_t H^{s,10/3}}
//
// with both time norms taken over the trajectory's span via the snapshot
// quadrature above.
inline double strichartz_norm(const Trajectory& u, double s) {
  detail::require_quadrature_ready(u, "dispersive norm");
  const double sup_part = detail::time_lebesgue(u, infinite_exponent, [&](std::size_t i) {
    return sobolev_norm(u.snapshots[i], s, 2.0);
  });
  const double q = 10.0 / 3.0;
  const double int_part = detail::time_lebesgue(u, q, [&](std::size_t i) {
    return sobolev_norm(u.snapshots[i], s, q);
  });
  return sup_part + int_part;
}

// ||a - b||_{S^s} for two trajectories over the same stamps and grid.
inline double trajectory_difference_norm(const Trajectory& a, const Trajectory& b,
                                         double s) {
  require_comparable(a, b, "trajectory difference");
  Trajectory diff;
  diff.grid = a.grid;
  diff.times = a.times;
  diff.snapshots.reserve(a.count());
  for (std::size_t i = 0; i < a.count(); ++i)
    diff.snapshots.push_back(a.snapshots[i] - b.snapshots[i]);
  return strichartz_norm(diff, s);
}

} // namespace dmnls
