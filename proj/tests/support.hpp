#pragma once

#include <dmnls/fft.hpp>
#include <dmnls/grid.hpp>

#include <random>

namespace support {

// Deterministic pseudo-random complex field; the fixed seed keeps every test
// run identical.
inline dmnls::Field random_field(const dmnls::SpectralGrid& grid,
                                 unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  dmnls::Field f = dmnls::Field::zero(grid);
  for (dmnls::Complex& z : f.samples) z = dmnls::Complex{normal(gen), normal(gen)};
  return f;
}

inline double rel(double got, double want) {
  return std::abs(got - want) / std::abs(want);
}

inline double linf_diff(const dmnls::Field& a, const dmnls::Field& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.samples.size(); ++i)
    m = std::max(m, std::abs(a.samples[i] - b.samples[i]));
  return m;
}

} // namespace support
