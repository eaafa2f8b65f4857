#pragma once

// Umbrella header: driven Markovian master equation toolkit for a pair of
// two-level systems steered along a dynamical invariant into the maximally
// entangled (|00> - |11>)/sqrt(2) state, with collective coupling to a
// common reservoir.

#include "dmme/algebra.hpp"
#include "dmme/bath.hpp"
#include "dmme/config.hpp"
#include "dmme/controls.hpp"
#include "dmme/dynamics.hpp"
#include "dmme/errors.hpp"
#include "dmme/experiments.hpp"
#include "dmme/invariant.hpp"
#include "dmme/rk45.hpp"
#include "dmme/selfcheck.hpp"
#include "dmme/special.hpp"
