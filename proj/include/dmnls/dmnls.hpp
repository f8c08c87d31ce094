#pragma once

// Umbrella header: the whole library in one include.
//
// Pseudospectral tools for the cubic Schrodinger equation with fast periodic
// dispersion management,
//
//     i d_t u + gamma(t/eps) Lap u = -|u|^2 u,
//
// on periodic boxes in one to three dimensions: exact accumulated-dispersion
// bookkeeping, linear propagators and their mixed-norm comparison, the
// soliton profile solver, a mass-exact splitting integrator, and the
// convergence studies that measure how the managed flow tracks the soliton
// orbit as eps shrinks.

#include "dmnls/errors.hpp"
#include "dmnls/version.hpp"

#include "dmnls/grid.hpp"
#include "dmnls/fft.hpp"
#include "dmnls/multipliers.hpp"

#include "dmnls/dispersion.hpp"
#include "dmnls/trajectory.hpp"
#include "dmnls/norms.hpp"
#include "dmnls/propagators.hpp"
#include "dmnls/ground_state.hpp"
#include "dmnls/evolution.hpp"

#include "dmnls/rate_fit.hpp"
#include "dmnls/config.hpp"
#include "dmnls/experiments.hpp"
#include "dmnls/field_io.hpp"
#include "dmnls/report_io.hpp"
