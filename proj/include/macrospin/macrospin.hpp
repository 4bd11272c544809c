#pragma once

// Umbrella header: the whole library.

#include "macrospin/calibration.hpp"
#include "macrospin/codegen.hpp"
#include "macrospin/conduction.hpp"
#include "macrospin/config.hpp"
#include "macrospin/constants.hpp"
#include "macrospin/csv.hpp"
#include "macrospin/device.hpp"
#include "macrospin/drive.hpp"
#include "macrospin/dynamics.hpp"
#include "macrospin/fields.hpp"
#include "macrospin/montecarlo.hpp"
#include "macrospin/rng.hpp"
#include "macrospin/solvers.hpp"
#include "macrospin/state.hpp"
#include "macrospin/vec.hpp"
#include "macrospin/version.hpp"
