#pragma once

#include <stdexcept>
#include <string>

namespace dmnls {

// Process exit codes shared by the command line tool and the test drivers.
namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int gate_failure = 1;
inline constexpr int numerical_abort = 2;
inline constexpr int io_failure = 3;
inline constexpr int usage = 64;
} // namespace exit_code

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A field argument is unusable: wrong sample count, non-finite entries,
// or a grid mismatch between operands.
struct InvalidField : Error {
  using Error::Error;
};

// A scalar argument is outside its documented domain.
struct InvalidParameter : Error {
  using Error::Error;
};

// A dispersion map failed admissibility; `condition` names the violated
// requirement ("mean", "coverage", "zero value", ...).
struct MapRejected : Error {
  std::string condition;
  MapRejected(std::string cond, const std::string& what)
      : Error(what), condition(std::move(cond)) {}
};

// An iteration ran out of its budget without meeting its tolerance.
struct Divergence : Error {
  double last_residual;
  Divergence(const std::string& what, double residual)
      : Error(what), last_residual(residual) {}
};

// A computation produced non-finite values.
struct NumericalFailure : Error {
  long step_index;
  NumericalFailure(const std::string& what, long step)
      : Error(what), step_index(step) {}
};

// A time integration tripped a safety monitor and stopped early.
struct AbortedRun : Error {
  double last_good_time;
  AbortedRun(const std::string& what, double t)
      : Error(what), last_good_time(t) {}
};

// A time interval or sample set is too small for the requested quantity.
struct DegenerateInterval : Error {
  using Error::Error;
};

// Two objects that must agree (time stamps, grids, row counts) do not.
struct Mismatch : Error {
  using Error::Error;
};

// A configuration file could not be interpreted; `key` names the culprit.
struct ConfigError : Error {
  std::string key;
  ConfigError(std::string k, const std::string& what)
      : Error(what), key(std::move(k)) {}
};

struct IoError : Error {
  using Error::Error;
};

} // namespace dmnls
