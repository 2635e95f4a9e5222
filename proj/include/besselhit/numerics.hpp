#pragma once

#include "besselhit/numerics/ks.hpp"
#include "besselhit/numerics/quadrature.hpp"
#include "besselhit/numerics/special.hpp"
