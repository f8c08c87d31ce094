#pragma once

#include <cmath>

#include "dmnls/fft.hpp"
#include "dmnls/grid.hpp"

namespace dmnls {

// Fourier multiplier m(|xi|) acting diagonally on mode coefficients.
//
//   homogeneous_fractional(s)    |xi|^s          (s >= 0; s = 0 is the identity)
//   inhomogeneous_fractional(s)  (1 + |xi|^2)^{s/2}   (any real s)
//   phase(theta)                 exp(-i theta |xi|^2)
//
// phase(theta) is the free Schrodinger flow over time theta: with the sign
// conventions used here, i d_t u + Lap u = 0 evolves coefficients as
// c_k(t) = exp(-i |xi_k|^2 t) c_k(0).
struct Multiplier {
  enum class Kind { homogeneous, inhomogeneous, phase };

  Kind kind;
  double param;

  static Multiplier homogeneous_fractional(double s) {
    if (!(s >= 0.0) || !std::isfinite(s))
      throw InvalidParameter("homogeneous order must be finite and >= 0");
    return Multiplier{Kind::homogeneous, s};
  }

  static Multiplier inhomogeneous_fractional(double s) {
    if (!std::isfinite(s))
      throw InvalidParameter("inhomogeneous order must be finite");
    return Multiplier{Kind::inhomogeneous, s};
  }

  static Multiplier phase(double theta) {
    if (!std::isfinite(theta))
      throw InvalidParameter("phase parameter must be finite");
    return Multiplier{Kind::phase, theta};
  }

  Complex symbol(double xi2) const {
    switch (kind) {
      case Kind::homogeneous:
        if (param == 0.0) return Complex{1.0, 0.0};
        return Complex{std::pow(xi2, 0.5 * param), 0.0};
      case Kind::inhomogeneous:
        return Complex{std::pow(1.0 + xi2, 0.5 * param), 0.0};
      case Kind::phase:
      default: {
        const double angle = param * xi2;
        return Complex{std::cos(angle), -std::sin(angle)};
      }
    }
  }
};

inline SpectralField apply_multiplier(const SpectralField& c, const Multiplier& m) {
  SpectralField out = c;
  const auto& xi2 = detail::grid_tables(c.grid).xi2;
  for (std::size_t i = 0; i < out.coefficients.size(); ++i)
    out.coefficients[i] *= m.symbol(xi2[i]);
  return out;
}

inline Field apply_multiplier(const Field& f, const Multiplier& m) {
  return inverse_transform(apply_multiplier(forward_transform(f), m));
}

} // namespace dmnls
