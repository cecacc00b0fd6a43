#pragma once

#include "fris/error.hpp"
#include "fris/specfun.hpp"
#include "fris/surface.hpp"
#include "fris/analytics.hpp"
#include "fris/channel.hpp"
#include "fris/montecarlo.hpp"
#include "fris/config.hpp"
#include "fris/sweep.hpp"
#include "fris/validation.hpp"
