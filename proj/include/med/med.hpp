#pragma once

#include "med/dist.hpp"
#include "med/dmin.hpp"
#include "med/experiment.hpp"
#include "med/policy.hpp"
#include "med/presets.hpp"
#include "med/rng.hpp"
#include "med/sim.hpp"
