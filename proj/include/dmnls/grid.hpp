#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "dmnls/errors.hpp"

namespace dmnls {

using Complex = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

// Uniform periodic grid on the box [-L, L)^d with N points per axis.
//
// Conventions used throughout:
//   spacing        h = 2L / N
//   node           x_j = -L + j h,  j = 0 .. N-1   (the center x = 0 is j = N/2)
//   mode index     i = 0 .. N-1 maps to the signed mode k = i for i < N/2,
//                  k = i - N otherwise (the standard DFT fold)
//   wavenumber     xi_k = pi k / L
//
// Multi-index storage is row major: for d = 3 the flat index of (j0, j1, j2)
// is (j0 * N + j1) * N + j2, and the same layout is used in mode space.
struct SpectralGrid {
  int dim = 1;
  int n = 0;
  double box = 0.0;

  static SpectralGrid make(int dim, int n, double box) {
    if (dim < 1 || dim > 3)
      throw InvalidParameter("grid dimension must be 1, 2, or 3, got " + std::to_string(dim));
    if (n < 8 || n % 2 != 0)
      throw InvalidParameter("grid size must be even and at least 8, got " + std::to_string(n));
    if (!(box > 0.0) || !std::isfinite(box))
      throw InvalidParameter("box half-width must be positive and finite");
    return SpectralGrid{dim, n, box};
  }

  std::size_t size() const {
    std::size_t s = 1;
    for (int a = 0; a < dim; ++a) s *= static_cast<std::size_t>(n);
    return s;
  }

  double spacing() const { return 2.0 * box / n; }

  double cell_volume() const {
    double v = 1.0;
    for (int a = 0; a < dim; ++a) v *= spacing();
    return v;
  }

  double coordinate(int j) const { return -box + j * spacing(); }

  int mode_number(int i) const { return i < n / 2 ? i : i - n; }

  double wavenumber(int i) const { return pi * mode_number(i) / box; }

  bool operator==(const SpectralGrid&) const = default;
};

// Complex scalar field sampled on a SpectralGrid, stored row major.
struct Field {
  SpectralGrid grid;
  std::vector<Complex> samples;

  static Field zero(const SpectralGrid& g) {
    return Field{g, std::vector<Complex>(g.size(), Complex{0.0, 0.0})};
  }
};

// Visits every grid node in storage order. The callback receives the flat
// index and the node coordinates (entries beyond `dim` are zero).
template <class F>
void for_each_point(const SpectralGrid& g, F&& fn) {
  const int n1 = g.dim > 1 ? g.n : 1;
  const int n2 = g.dim > 2 ? g.n : 1;
  std::array<double, 3> x{0.0, 0.0, 0.0};
  std::size_t idx = 0;
  for (int j0 = 0; j0 < g.n; ++j0) {
    x[0] = g.coordinate(j0);
    for (int j1 = 0; j1 < n1; ++j1) {
      if (g.dim > 1) x[1] = g.coordinate(j1);
      for (int j2 = 0; j2 < n2; ++j2) {
        if (g.dim > 2) x[2] = g.coordinate(j2);
        fn(idx++, x);
      }
    }
  }
}

// Visits every mode in storage order with the squared wavenumber |xi|^2.
template <class F>
void for_each_mode(const SpectralGrid& g, F&& fn) {
  const int n1 = g.dim > 1 ? g.n : 1;
  const int n2 = g.dim > 2 ? g.n : 1;
  std::size_t idx = 0;
  for (int i0 = 0; i0 < g.n; ++i0) {
    const double a0 = g.wavenumber(i0);
    double s0 = a0 * a0;
    for (int i1 = 0; i1 < n1; ++i1) {
      double s1 = s0;
      if (g.dim > 1) {
        const double a1 = g.wavenumber(i1);
        s1 += a1 * a1;
      }
      for (int i2 = 0; i2 < n2; ++i2) {
        double s2 = s1;
        if (g.dim > 2) {
          const double a2 = g.wavenumber(i2);
          s2 += a2 * a2;
        }
        fn(idx++, s2);
      }
    }
  }
}

template <class F>
Field field_from_function(const SpectralGrid& g, F&& fn) {
  Field f = Field::zero(g);
  for_each_point(g, [&](std::size_t idx, const std::array<double, 3>& x) {
    f.samples[idx] = Complex(fn(x));
  });
  return f;
}

inline void require_valid(const Field& f, const char* who) {
  if (f.samples.size() != f.grid.size())
    throw InvalidField(std::string(who) + ": sample count does not match grid");
  for (const Complex& z : f.samples)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw InvalidField(std::string(who) + ": field contains non-finite samples");
}

inline void require_same_grid(const Field& a, const Field& b, const char* who) {
  if (!(a.grid == b.grid))
    throw InvalidField(std::string(who) + ": fields live on different grids");
}

inline Field operator+(const Field& a, const Field& b) {
  require_same_grid(a, b, "field sum");
  Field out = a;
  for (std::size_t i = 0; i < out.samples.size(); ++i) out.samples[i] += b.samples[i];
  return out;
}

inline Field operator-(const Field& a, const Field& b) {
  require_same_grid(a, b, "field difference");
  Field out = a;
  for (std::size_t i = 0; i < out.samples.size(); ++i) out.samples[i] -= b.samples[i];
  return out;
}

inline Field operator*(Complex c, const Field& a) {
  Field out = a;
  for (Complex& z : out.samples) z *= c;
  return out;
}

// Discrete L^2 inner product <a, b> = h^d sum a conj(b).
inline Complex inner_product(const Field& a, const Field& b) {
  require_same_grid(a, b, "inner product");
  Complex acc{0.0, 0.0};
  for (std::size_t i = 0; i < a.samples.size(); ++i)
    acc += a.samples[i] * std::conj(b.samples[i]);
  return acc * a.grid.cell_volume();
}

inline double l2_norm(const Field& f) {
  double acc = 0.0;
  for (const Complex& z : f.samples) acc += std::norm(z);
  return std::sqrt(acc * f.grid.cell_volume());
}

inline double max_abs(const Field& f) {
  double m = 0.0;
  for (const Complex& z : f.samples) m = std::max(m, std::abs(z));
  return m;
}

} // namespace dmnls
