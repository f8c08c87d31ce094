// Prints the accumulated-dispersion deviation sup_{[0,T]} |Gamma_eps(0,t) - t|
// for the stock two-piece profile over a ladder of scales. The numbers shrink
// linearly in eps with the one-period extremum as the constant.

#include <cmath>
#include <cstdio>

#include <dmnls/dispersion.hpp>

int main() {
  using namespace dmnls;
  const DispersionMap map =
      DispersionMap::validate_admissible({{0.5, 3.0}, {0.5, -1.0}});
  const double horizon = 10.0;

  std::printf("map %s, horizon %g\n", map.describe().c_str(), horizon);
  std::printf("%-12s %-14s %s\n", "eps", "deviation", "deviation/eps");
  for (int k = 2; k <= 10; ++k) {
    const double eps = std::pow(2.0, -k);
    const double dev = deviation_sup(map, eps, horizon, 16);
    std::printf("%-12g %-14.6e %.9f\n", eps, dev, dev / eps);
  }
  return 0;
}
