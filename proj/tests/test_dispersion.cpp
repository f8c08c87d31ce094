#include <dmnls/dispersion.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "oracles.hpp"
#include "support.hpp"

using namespace dmnls;

namespace {

DispersionMap twopiece() {
  return DispersionMap::validate_admissible({{0.5, 3.0}, {0.5, -1.0}});
}

DispersionMap threepiece() {
  // mean 0.375*2 + 0.375*2 - 0.25*2 = 1
  return DispersionMap::validate_admissible(
      {{0.375, 2.0}, {0.375, 2.0}, {0.25, -2.0}});
}

} // namespace

TEST_CASE("admissibility accepts mean-one covers and rejects the rest",
          "[dispersion]") {
  const DispersionMap unit = DispersionMap::validate_admissible({{1.0, 1.0}});
  CHECK(unit.is_unit());
  CHECK(unit.mean() == 1.0);

  const DispersionMap two = twopiece();
  CHECK(two.mean() == Catch::Approx(1.0));
  CHECK(two.segment_count() == 2);
  CHECK_FALSE(two.is_unit());

  CHECK_THROWS_AS(DispersionMap::validate_admissible({}), MapRejected);
  CHECK_THROWS_AS(DispersionMap::validate_admissible({{0.5, 2.0}, {0.5, 0.0}}),
                  MapRejected);
  CHECK_THROWS_AS(DispersionMap::validate_admissible({{0.5, 2.0}, {0.4, -1.0}}),
                  MapRejected);
  CHECK_THROWS_AS(DispersionMap::validate_admissible({{0.5, 2.0}, {0.5, -1.0}}),
                  MapRejected);
  CHECK_THROWS_AS(DispersionMap::validate_admissible({{-0.5, 2.0}, {1.5, 1.0}}),
                  MapRejected);

  // rejection reasons are carried on the exception
  try {
    DispersionMap::validate_admissible({{0.5, 2.0}, {0.5, 0.0}});
    FAIL("expected a rejection");
  } catch (const MapRejected& e) {
    CHECK(e.condition == "zero value");
  }
}

TEST_CASE("gamma lookup is right continuous and periodic", "[dispersion]") {
  const DispersionMap two = twopiece();
  CHECK(two.value_at(0.25) == 3.0);
  CHECK(two.value_at(1.75) == -1.0);
  CHECK(two.value_at(0.5) == -1.0);
  CHECK(two.value_at(0.0) == 3.0);
  CHECK(two.value_at(-0.25) == -1.0);
  CHECK(two.value_at(17.25) == 3.0);
}

TEST_CASE("accumulated dispersion closed form", "[dispersion]") {
  const DispersionMap unit = DispersionMap::unit();
  const DispersionMap two = twopiece();

  // unit map: exactly t1 - t0, any eps
  CHECK(accumulated_dispersion(unit, 0.37, 0.0, 2.125) == 2.125);
  CHECK(accumulated_dispersion(unit, 1e-8, -1.5, 0.25) == 1.75);

  // whole periods integrate to mean times length
  CHECK(accumulated_dispersion(two, 0.1, 0.0, 0.5) == Catch::Approx(0.5).epsilon(1e-14));
  CHECK(accumulated_dispersion(two, 0.25, 0.5, 1.5) == Catch::Approx(1.0).epsilon(1e-14));

  // partial segment by hand: eps = 0.1, [0, 0.05] sits in the value-3 piece
  CHECK(accumulated_dispersion(two, 0.1, 0.0, 0.05) == Catch::Approx(0.15).epsilon(1e-14));

  CHECK_THROWS_AS(accumulated_dispersion(two, 0.0, 0.0, 1.0), InvalidParameter);
  CHECK_THROWS_AS(accumulated_dispersion(two, -0.5, 0.0, 1.0), InvalidParameter);
}

TEST_CASE("accumulated dispersion is additive and antisymmetric", "[dispersion]") {
  const DispersionMap three = threepiece();
  const double eps = 0.37;
  const double t0 = -0.8, t1 = 0.45, t2 = 2.3;
  const double a = accumulated_dispersion(three, eps, t0, t1);
  const double b = accumulated_dispersion(three, eps, t1, t2);
  const double c = accumulated_dispersion(three, eps, t0, t2);
  CHECK(std::abs(a + b - c) < 1e-12 * (std::abs(t2 - t0) + 1.0));
  CHECK(accumulated_dispersion(three, eps, t1, t0) == -a);
}

TEST_CASE("accumulated dispersion matches blind quadrature of gamma",
          "[dispersion]") {
  const DispersionMap two = twopiece();
  const DispersionMap three = threepiece();
  std::mt19937 gen(1234);
  std::uniform_real_distribution<double> pick_t(-4.0, 4.0);
  std::uniform_real_distribution<double> pick_log_eps(-6.0, -1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const DispersionMap& map = trial % 2 ? three : two;
    const double eps = std::pow(2.0, pick_log_eps(gen));
    const double t0 = pick_t(gen);
    const double t1 = pick_t(gen);
    const double exact = accumulated_dispersion(map, eps, t0, t1);
    const double quad = oracle::refined_gamma(map, eps, t0, t1);
    CHECK(std::abs(exact - quad) < 1e-9);
  }
}

TEST_CASE("deviation extremum: unit map, hand values, exact eps scaling",
          "[dispersion]") {
  CHECK(deviation_sup(DispersionMap::unit(), 0.01, 10.0) == 0.0);

  // two-piece {3, -1}: one-period extremum 1, so deviation = eps on [0, T]
  const DispersionMap two = twopiece();
  CHECK(deviation_sup(two, 1.0, 1.0) == Catch::Approx(1.0).epsilon(1e-14));
  CHECK(deviation_sup(two, 0.125, 10.0) == Catch::Approx(0.125).epsilon(1e-12));

  // halving eps halves the deviation, exactly
  const double at_quarter = deviation_sup(two, 0.25, 10.0);
  const double at_eighth = deviation_sup(two, 0.125, 10.0);
  CHECK(at_eighth == Catch::Approx(0.5 * at_quarter).epsilon(1e-14));

  // eps-linearity across the dyadic sweep, 1e-9 relative
  const double base = deviation_sup(two, std::pow(2.0, -2), 10.0) / std::pow(2.0, -2);
  for (int k = 3; k <= 10; ++k) {
    const double eps = std::pow(2.0, -k);
    CHECK(support::rel(deviation_sup(two, eps, 10.0) / eps, base) < 1e-9);
  }
}

TEST_CASE("deviation extremum matches dense sampling", "[dispersion]") {
  // sample count chosen so every breakpoint image lands on the dense grid
  const DispersionMap two = twopiece();
  CHECK(deviation_sup(two, 1.0, 1.0) ==
        Catch::Approx(oracle::dense_deviation_sup(two, 1.0, 1.0, 1000)).epsilon(1e-12));

  const DispersionMap three = threepiece();
  // one-period extremum of int (gamma - 1): max at sigma = 0.75, value 0.75
  CHECK(oracle::dense_deviation_sup(three, 1.0, 1.0, 1000) ==
        Catch::Approx(0.75).epsilon(1e-12));
  CHECK(deviation_sup(three, 1.0, 1.0) == Catch::Approx(0.75).epsilon(1e-12));
  CHECK(deviation_sup(three, 0.0625, 4.0) ==
        Catch::Approx(0.0625 * 0.75).epsilon(1e-12));
}

TEST_CASE("map description strings", "[dispersion]") {
  CHECK(DispersionMap::unit().describe() == "unit");
  CHECK(twopiece().describe() == "0.5:3,0.5:-1");
}
