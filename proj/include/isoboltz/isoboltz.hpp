#pragma once

#include "analysis.hpp"
#include "checks.hpp"
#include "collision.hpp"
#include "config.hpp"
#include "constants.hpp"
#include "errors.hpp"
#include "grid.hpp"
#include "parallel.hpp"
#include "random.hpp"
#include "sim.hpp"
#include "specfun.hpp"
#include "spectral.hpp"
#include "spline.hpp"
