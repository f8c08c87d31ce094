#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "dmnls/errors.hpp"

namespace dmnls {

// One piece of a piecewise constant dispersion profile: gamma takes `value`
// on an interval of the given length.
struct Segment {
  double length;
  double value;
};

// A 1-periodic piecewise constant dispersion profile gamma with mean one.
//
// Admissibility (checked at construction):
//   - at least one segment, every length > 0, lengths sum to 1,
//   - every value nonzero,
//   - the average of gamma over one period equals 1.
//
// The running integral G(sigma) = int_0^sigma gamma is evaluated in closed
// form from per-segment prefix sums, so no quadrature error enters anywhere
// downstream: accumulated_dispersion below is exact up to rounding.
class DispersionMap {
public:
  static DispersionMap unit() {
    DispersionMap m;
    m.tau_ = {0.0, 1.0};
    m.val_ = {1.0};
    m.prefix_ = {0.0, 1.0};
    m.mean_ = 1.0;
    m.unit_ = true;
    return m;
  }

  static DispersionMap validate_admissible(const std::vector<Segment>& segments,
                                           double tol = 1e-12) {
    if (segments.empty())
      throw MapRejected("coverage", "dispersion map needs at least one segment");
    DispersionMap m;
    m.tau_.push_back(0.0);
    double running = 0.0;
    double mean = 0.0;
    for (const Segment& s : segments) {
      if (!(s.length > 0.0) || !std::isfinite(s.length))
        throw MapRejected("coverage", "segment lengths must be positive");
      if (s.value == 0.0 || !std::isfinite(s.value))
        throw MapRejected("zero value", "segment values must be nonzero");
      running += s.length;
      mean += s.length * s.value;
      m.tau_.push_back(running);
      m.val_.push_back(s.value);
    }
    if (std::abs(running - 1.0) > tol)
      throw MapRejected("coverage", "segment lengths must cover [0,1], got total " +
                                        std::to_string(running));
    m.tau_.back() = 1.0;
    if (std::abs(mean - 1.0) > tol)
      throw MapRejected("mean", "map mean must equal 1, got " + std::to_string(mean));
    m.mean_ = mean;
    m.prefix_.resize(m.val_.size() + 1);
    m.prefix_[0] = 0.0;
    for (std::size_t i = 0; i < m.val_.size(); ++i)
      m.prefix_[i + 1] = m.prefix_[i] + m.val_[i] * (m.tau_[i + 1] - m.tau_[i]);
    m.unit_ = std::all_of(m.val_.begin(), m.val_.end(),
                          [](double v) { return v == 1.0; });
    return m;
  }

  // gamma at (fractional part of) t; right continuous at breakpoints.
  double value_at(double t) const {
    double s = t - std::floor(t);
    if (s >= 1.0) s = 0.0;
    return val_[segment_index(s)];
  }

  double mean() const { return mean_; }
  bool is_unit() const { return unit_; }
  std::size_t segment_count() const { return val_.size(); }
  const std::vector<double>& breakpoints() const { return tau_; }
  const std::vector<double>& values() const { return val_; }

  double min_abs_value() const {
    double m = std::abs(val_[0]);
    for (double v : val_) m = std::min(m, std::abs(v));
    return m;
  }

  double max_abs_value() const {
    double m = 0.0;
    for (double v : val_) m = std::max(m, std::abs(v));
    return m;
  }

  // G(sigma) = int_0^sigma gamma(tau) dtau, valid for any real sigma.
  double antiderivative(double sigma) const {
    const double k = std::floor(sigma);
    double s = sigma - k;
    if (s >= 1.0) s = 0.0;
    const std::size_t i = segment_index(s);
    return k * mean_ + prefix_[i] + val_[i] * (s - tau_[i]);
  }

  // "length:value,length:value,..." for reports and logs.
  std::string describe() const {
    if (unit_ && val_.size() == 1) return "unit";
    std::string out;
    char buf[64];
    for (std::size_t i = 0; i < val_.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%g:%g", tau_[i + 1] - tau_[i], val_[i]);
      if (i) out += ',';
      out += buf;
    }
    return out;
  }

private:
  DispersionMap() = default;

  std::size_t segment_index(double s) const {
    // s in [0, 1); pick i with tau_i <= s < tau_{i+1}
    std::size_t i = 0;
    while (i + 1 < val_.size() && s >= tau_[i + 1]) ++i;
    return i;
  }

  std::vector<double> tau_;     // breakpoints, tau_0 = 0 .. tau_m = 1
  std::vector<double> val_;     // segment values
  std::vector<double> prefix_;  // prefix_[i] = int_0^{tau_i} gamma
  double mean_ = 0.0;
  bool unit_ = false;
};

// Gamma_eps(t0, t1) = int_{t0}^{t1} gamma(tau / eps) dtau, evaluated in
// closed form as eps (G(t1/eps) - G(t0/eps)). For the unit map this returns
// exactly t1 - t0, bit for bit, for any eps.
inline double accumulated_dispersion(const DispersionMap& map, double eps,
                                     double t0, double t1) {
  if (!(eps > 0.0) || !std::isfinite(eps))
    throw InvalidParameter("eps must be positive and finite");
  if (!std::isfinite(t0) || !std::isfinite(t1))
    throw InvalidParameter("time endpoints must be finite");
  if (map.is_unit()) return t1 - t0;
  return eps * (map.antiderivative(t1 / eps) - map.antiderivative(t0 / eps));
}

// sup over t in [0, t_max] of |Gamma_eps(0, t) - t|.
//
// The deviation is piecewise linear in t with kinks exactly at the breakpoint
// images eps (j + tau_i), so sampling every such image (plus a uniform grid
// of `samples_per_period` points per eps-period and the endpoints) evaluates
// the supremum exactly.
inline double deviation_sup(const DispersionMap& map, double eps, double t_max,
                            int samples_per_period = 4) {
  if (!(eps > 0.0) || !std::isfinite(eps))
    throw InvalidParameter("eps must be positive and finite");
  if (!(t_max > 0.0) || !std::isfinite(t_max))
    throw InvalidParameter("t_max must be positive and finite");
  if (samples_per_period < 1)
    throw InvalidParameter("need at least one sample per period");
  if (map.is_unit()) return 0.0;

  const auto& tau = map.breakpoints();
  double sup = 0.0;
  auto probe = [&](double t) {
    if (t < 0.0 || t > t_max) return;
    const double dev = std::abs(accumulated_dispersion(map, eps, 0.0, t) - t);
    sup = std::max(sup, dev);
  };
  const long periods = static_cast<long>(std::floor(t_max / eps));
  for (long j = 0; j <= periods; ++j) {
    for (std::size_t i = 1; i < tau.size(); ++i) probe(eps * (j + tau[i]));
    for (int k = 0; k < samples_per_period; ++k)
      probe(eps * (j + static_cast<double>(k) / samples_per_period));
  }
  probe(t_max);
  return sup;
}

} // namespace dmnls
