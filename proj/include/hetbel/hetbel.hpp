#pragma once

#include "config.hpp"
#include "csv.hpp"
#include "diagnostics.hpp"
#include "ensemble.hpp"
#include "equilibrium.hpp"
#include "experiments.hpp"
#include "filters.hpp"
#include "model_core.hpp"
#include "params.hpp"
#include "rng.hpp"
#include "stats.hpp"
#include "strategist.hpp"
#include "survival.hpp"
#include "svg.hpp"
#include "welfare.hpp"
