#pragma once

#include "besselhit/simulate/engine.hpp"
#include "besselhit/simulate/rng.hpp"
#include "besselhit/simulate/sample_set.hpp"
#include "besselhit/simulate/samplers.hpp"
