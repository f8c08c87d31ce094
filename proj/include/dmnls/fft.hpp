#pragma once

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <utility>
#include <vector>

#include "dmnls/grid.hpp"

namespace dmnls {

// Transform conventions.
//
// With the orthonormal periodic basis  e_k(x) = (2L)^{-d/2} exp(i xi_k . x),
// the forward transform returns the coefficient vector
//
//     c_k = <f, e_k>_{L^2}  =  (2L)^{d/2} N^{-d} sum_j f_j exp(-i xi_k . x_j)
//
// and the inverse reconstructs f_j = (2L)^{-d/2} sum_k c_k exp(i xi_k . x_j).
// The pair is unitary from the h^d-weighted discrete L^2 norm to the plain
// Euclidean norm of c, so Parseval holds exactly up to rounding:
//
//     h^d sum_j |f_j|^2  =  sum_k |c_k|^2.
//
// Because the nodes start at x = -L rather than 0, the physical phase differs
// from the raw DFT phase by (-1)^{k_1 + ... + k_d}; that sign is folded in
// here so coefficients really are inner products against exp(i xi_k . x).
//
// Plans use FFTW_ESTIMATE so planning is deterministic across runs, and
// FFTW_UNALIGNED so they can execute on arbitrary caller buffers. Everything
// in this header is single threaded.

namespace detail {

struct GridTables {
  std::vector<double> xi2;   // |xi|^2 by flat mode index
  std::vector<double> sign;  // (-1)^(k_1 + ... + k_d) by flat mode index
};

inline const GridTables& grid_tables(const SpectralGrid& g) {
  static std::map<std::tuple<int, int, double>, std::unique_ptr<GridTables>> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  const auto key = std::make_tuple(g.dim, g.n, g.box);
  auto it = cache.find(key);
  if (it == cache.end()) {
    auto tables = std::make_unique<GridTables>();
    tables->xi2.resize(g.size());
    tables->sign.resize(g.size());
    for_each_mode(g, [&](std::size_t idx, double xi2) { tables->xi2[idx] = xi2; });
    const int n1 = g.dim > 1 ? g.n : 1;
    const int n2 = g.dim > 2 ? g.n : 1;
    std::size_t idx = 0;
    for (int i0 = 0; i0 < g.n; ++i0)
      for (int i1 = 0; i1 < n1; ++i1)
        for (int i2 = 0; i2 < n2; ++i2)
          tables->sign[idx++] = ((i0 + i1 + i2) % 2 == 0) ? 1.0 : -1.0;
    it = cache.emplace(key, std::move(tables)).first;
  }
  return *it->second;
}

struct PlanSet {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

inline const PlanSet& plans_for(const SpectralGrid& g) {
  static std::map<std::pair<int, int>, PlanSet> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  const auto key = std::make_pair(g.dim, g.n);
  auto it = cache.find(key);
  if (it == cache.end()) {
    std::vector<Complex> a(g.size()), b(g.size());
    int dims[3] = {g.n, g.n, g.n};
    PlanSet p;
    p.forward = fftw_plan_dft(g.dim, dims,
                              reinterpret_cast<fftw_complex*>(a.data()),
                              reinterpret_cast<fftw_complex*>(b.data()),
                              FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    p.backward = fftw_plan_dft(g.dim, dims,
                               reinterpret_cast<fftw_complex*>(a.data()),
                               reinterpret_cast<fftw_complex*>(b.data()),
                               FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (p.forward == nullptr || p.backward == nullptr)
      throw NumericalFailure("failed to create transform plans", 0);
    it = cache.emplace(key, p).first;
  }
  return it->second;
}

inline void execute_dft(fftw_plan plan, const Complex* in, Complex* out) {
  // Out-of-place c2c transforms leave the input untouched.
  fftw_execute_dft(plan,
                   reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

inline double forward_scale(const SpectralGrid& g) {
  double s = 1.0;
  for (int a = 0; a < g.dim; ++a) s *= std::sqrt(2.0 * g.box) / g.n;
  return s;
}

inline double inverse_scale(const SpectralGrid& g) {
  double s = 1.0;
  for (int a = 0; a < g.dim; ++a) s /= std::sqrt(2.0 * g.box);
  return s;
}

} // namespace detail

// Coefficients of a Field with respect to the orthonormal exponential basis,
// stored by flat mode index (same layout as the sample array).
struct SpectralField {
  SpectralGrid grid;
  std::vector<Complex> coefficients;
};

inline SpectralField forward_transform(const Field& f) {
  require_valid(f, "forward transform");
  const auto& plans = detail::plans_for(f.grid);
  const auto& tables = detail::grid_tables(f.grid);
  SpectralField out{f.grid, std::vector<Complex>(f.grid.size())};
  detail::execute_dft(plans.forward, f.samples.data(), out.coefficients.data());
  const double scale = detail::forward_scale(f.grid);
  for (std::size_t i = 0; i < out.coefficients.size(); ++i)
    out.coefficients[i] *= scale * tables.sign[i];
  return out;
}

inline Field inverse_transform(const SpectralField& c) {
  if (c.coefficients.size() != c.grid.size())
    throw InvalidField("inverse transform: coefficient count does not match grid");
  const auto& plans = detail::plans_for(c.grid);
  const auto& tables = detail::grid_tables(c.grid);
  const double scale = detail::inverse_scale(c.grid);
  std::vector<Complex> scratch(c.grid.size());
  for (std::size_t i = 0; i < scratch.size(); ++i)
    scratch[i] = c.coefficients[i] * (scale * tables.sign[i]);
  Field out = Field::zero(c.grid);
  detail::execute_dft(plans.backward, scratch.data(), out.samples.data());
  return out;
}

inline double l2_norm(const SpectralField& c) {
  double acc = 0.0;
  for (const Complex& z : c.coefficients) acc += std::norm(z);
  return std::sqrt(acc);
}

// Reusable physical/spectral shuttle for tight loops: one owned mode buffer,
// no per-call allocation. Not thread safe, like everything else here.
class SpectralWorkspace {
public:
  explicit SpectralWorkspace(const SpectralGrid& g)
      : grid_(g),
        modes_(g.size()),
        tables_(&detail::grid_tables(g)),
        plans_(&detail::plans_for(g)),
        fwd_(detail::forward_scale(g)),
        inv_(detail::inverse_scale(g)) {}

  // samples -> internal normalized mode buffer
  void to_modes(const std::vector<Complex>& samples) {
    detail::execute_dft(plans_->forward, samples.data(), modes_.data());
    for (std::size_t i = 0; i < modes_.size(); ++i)
      modes_[i] *= fwd_ * tables_->sign[i];
  }

  // internal mode buffer -> samples (consumes the mode buffer)
  void to_samples(std::vector<Complex>& samples) {
    for (std::size_t i = 0; i < modes_.size(); ++i)
      modes_[i] *= inv_ * tables_->sign[i];
    detail::execute_dft(plans_->backward, modes_.data(), samples.data());
  }

  std::vector<Complex>& modes() { return modes_; }
  const std::vector<double>& xi2() const { return tables_->xi2; }
  const SpectralGrid& grid() const { return grid_; }

private:
  SpectralGrid grid_;
  std::vector<Complex> modes_;
  const detail::GridTables* tables_;
  const detail::PlanSet* plans_;
  double fwd_, inv_;
};

// Fraction of spectral mass carried by the top octave of modes, i.e. those
// with |xi|_inf above half the axis maximum. A resolved field keeps this
// small; values near 1 flag an under-resolved or aliasing computation.
inline double spectral_tail_fraction(const SpectralField& c) {
  const SpectralGrid& g = c.grid;
  const double cutoff = 0.5 * pi * (g.n / 2) / g.box;
  double tail = 0.0, total = 0.0;
  const int n1 = g.dim > 1 ? g.n : 1;
  const int n2 = g.dim > 2 ? g.n : 1;
  std::size_t idx = 0;
  for (int i0 = 0; i0 < g.n; ++i0) {
    const double w0 = std::abs(g.wavenumber(i0));
    for (int i1 = 0; i1 < n1; ++i1) {
      const double w1 = g.dim > 1 ? std::abs(g.wavenumber(i1)) : 0.0;
      for (int i2 = 0; i2 < n2; ++i2) {
        const double w2 = g.dim > 2 ? std::abs(g.wavenumber(i2)) : 0.0;
        const double e = std::norm(c.coefficients[idx++]);
        total += e;
        if (std::max(w0, std::max(w1, w2)) >= cutoff) tail += e;
      }
    }
  }
  return total > 0.0 ? tail / total : 0.0;
}

inline double spectral_tail_fraction(const Field& f) {
  return spectral_tail_fraction(forward_transform(f));
}

} // namespace dmnls
