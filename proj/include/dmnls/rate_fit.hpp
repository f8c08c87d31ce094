#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "dmnls/errors.hpp"

namespace dmnls {

// Least-squares power law err ~ C eps^slope, fitted in log-log coordinates.
struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;      // log C
  double r_squared = 1.0;
  double jackknife_spread = 0.0; // max |slope_without_i - slope| over i
  int points = 0;
};

namespace detail {

inline RateFit least_squares_loglog(const std::vector<double>& x,
                                    const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  RateFit fit;
  fit.points = static_cast<int>(n);
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res += r * r;
  }
  fit.r_squared = syy > 1e-300 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

} // namespace detail

// Fits log err against log eps. Requires at least three strictly positive
// samples; the jackknife spread (max slope change when one point is dropped)
// is a cheap stability certificate for the fitted rate.
inline RateFit fit_rate(const std::vector<double>& eps,
                        const std::vector<double>& err) {
  if (eps.size() != err.size())
    throw Mismatch("rate fit: eps and err lengths differ");
  if (eps.size() < 3)
    throw DegenerateInterval("rate fit needs at least three points");
  std::vector<double> x(eps.size()), y(err.size());
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0))
      throw InvalidParameter("rate fit: row " + std::to_string(i) +
                             ": eps must be > 0");
    if (!(err[i] > 0.0))
      throw InvalidParameter("rate fit: row " + std::to_string(i) +
                             ": err must be > 0");
    x[i] = std::log(eps[i]);
    y[i] = std::log(err[i]);
  }
  RateFit fit = detail::least_squares_loglog(x, y);
  for (std::size_t drop = 0; drop < x.size(); ++drop) {
    std::vector<double> xs, ys;
    xs.reserve(x.size() - 1);
    ys.reserve(y.size() - 1);
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (i == drop) continue;
      xs.push_back(x[i]);
      ys.push_back(y[i]);
    }
    const RateFit partial = detail::least_squares_loglog(xs, ys);
    fit.jackknife_spread =
        std::max(fit.jackknife_spread, std::abs(partial.slope - fit.slope));
  }
  return fit;
}

} // namespace dmnls
