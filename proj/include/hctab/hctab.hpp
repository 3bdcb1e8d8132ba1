#pragma once

// Umbrella header for the core library (no yaml-cpp dependency).

#include "hctab/baselines.hpp"
#include "hctab/error.hpp"
#include "hctab/game.hpp"
#include "hctab/harness.hpp"
#include "hctab/instance.hpp"
#include "hctab/learning.hpp"
#include "hctab/oracle.hpp"
