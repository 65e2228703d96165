#pragma once

// Umbrella header: parallel-in-time integration of a temporally homogenized
// plaque growth model.

#include "tempoloop/config.hpp"
#include "tempoloop/errors.hpp"
#include "tempoloop/growth.hpp"
#include "tempoloop/growth_table.hpp"
#include "tempoloop/micro.hpp"
#include "tempoloop/parareal.hpp"
#include "tempoloop/report.hpp"
#include "tempoloop/twoscale.hpp"
