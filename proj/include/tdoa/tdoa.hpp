#pragma once

#include "tdoa/errors.hpp"
#include "tdoa/exterior_algebra.hpp"
#include "tdoa/sensor_config.hpp"
#include "tdoa/forward.hpp"
#include "tdoa/tau_domain.hpp"
#include "tdoa/localizer.hpp"
#include "tdoa/brute_force.hpp"
#include "tdoa/bifurcation.hpp"
#include "tdoa/complete_map.hpp"
