#pragma once

#include "barrier_gains.hpp"
#include "config_io.hpp"
#include "core_types.hpp"
#include "diagnostics.hpp"
#include "gain_scheduler.hpp"
#include "lyapunov.hpp"
#include "perturbation.hpp"
#include "plant_sim.hpp"
#include "selftest.hpp"
#include "stsmc_controller.hpp"
