#include <dmnls/fft.hpp>
#include <dmnls/grid.hpp>
#include <dmnls/multipliers.hpp>

#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using namespace dmnls;

TEST_CASE("homogeneous symbol of order 2 acts as minus the Laplacian",
          "[multipliers]") {
  const SpectralGrid g = SpectralGrid::make(1, 128, 10.0);
  const double xi1 = pi / g.box;
  const Field mode = field_from_function(g, [&](const std::array<double, 3>& x) {
    return std::sin(xi1 * x[0]);
  });
  const Field lap = apply_multiplier(mode, Multiplier::homogeneous_fractional(2.0));
  for (std::size_t i = 0; i < mode.samples.size(); ++i)
    CHECK(std::abs(lap.samples[i] - xi1 * xi1 * mode.samples[i]) < 1e-12);
}

TEST_CASE("zero-order symbols are the identity", "[multipliers]") {
  const SpectralGrid g = SpectralGrid::make(2, 24, 6.0);
  const Field f = support::random_field(g, 17);
  CHECK(support::linf_diff(apply_multiplier(f, Multiplier::phase(0.0)), f) <
        1e-13 * max_abs(f));
  CHECK(support::linf_diff(apply_multiplier(f, Multiplier::inhomogeneous_fractional(0.0)), f) <
        1e-13 * max_abs(f));
  // |xi|^0 is 1 by convention, including at the zero mode
  CHECK(support::linf_diff(apply_multiplier(f, Multiplier::homogeneous_fractional(0.0)), f) <
        1e-13 * max_abs(f));
}

TEST_CASE("phase symbols compose additively and preserve mass", "[multipliers]") {
  const SpectralGrid g = SpectralGrid::make(1, 256, 12.0);
  const Field f = support::random_field(g, 29);
  const Field two_steps = apply_multiplier(
      apply_multiplier(f, Multiplier::phase(0.3)), Multiplier::phase(0.45));
  const Field one_step = apply_multiplier(f, Multiplier::phase(0.75));
  CHECK(support::linf_diff(two_steps, one_step) < 1e-12 * max_abs(f));

  const double before = l2_norm(f);
  const double after = l2_norm(apply_multiplier(f, Multiplier::phase(1.7)));
  CHECK(support::rel(after, before) < 1e-12);
}

TEST_CASE("fractional symbols take negative orders only when inhomogeneous",
          "[multipliers]") {
  CHECK_THROWS_AS(Multiplier::homogeneous_fractional(-0.5), InvalidParameter);
  const SpectralGrid g = SpectralGrid::make(1, 64, 8.0);
  const Field f = support::random_field(g, 31);
  // (1+|xi|^2)^{-s/2} then (1+|xi|^2)^{+s/2} is the identity
  const Field smoothed = apply_multiplier(f, Multiplier::inhomogeneous_fractional(-0.8));
  const Field back = apply_multiplier(smoothed, Multiplier::inhomogeneous_fractional(0.8));
  CHECK(support::linf_diff(back, f) < 1e-12 * max_abs(f));
}

TEST_CASE("multiplier application agrees between sample and mode inputs",
          "[multipliers]") {
  const SpectralGrid g = SpectralGrid::make(1, 64, 8.0);
  const Field f = support::random_field(g, 37);
  const Multiplier m = Multiplier::inhomogeneous_fractional(1.5);
  const Field via_samples = apply_multiplier(f, m);
  const Field via_modes = inverse_transform(apply_multiplier(forward_transform(f), m));
  CHECK(support::linf_diff(via_samples, via_modes) < 1e-12 * max_abs(f));
}
