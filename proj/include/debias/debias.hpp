#pragma once

#include "debias/types.hpp"
#include "debias/random.hpp"
#include "debias/model_core.hpp"
#include "debias/dataset_io.hpp"
#include "debias/cone_geometry.hpp"
#include "debias/estimators.hpp"
#include "debias/pilot_selection.hpp"
#include "debias/debias_engine.hpp"
#include "debias/inference.hpp"
#include "debias/sim_harness.hpp"
#include "debias/report.hpp"
