#pragma once

#include "gridflow/balance.hpp"
#include "gridflow/burst.hpp"
#include "gridflow/cooptimize.hpp"
#include "gridflow/device.hpp"
#include "gridflow/error.hpp"
#include "gridflow/floorplan.hpp"
#include "gridflow/graph.hpp"
#include "gridflow/hbm.hpp"
#include "gridflow/ilp.hpp"
#include "gridflow/options.hpp"
#include "gridflow/partition.hpp"
#include "gridflow/pipeline.hpp"
#include "gridflow/project.hpp"
#include "gridflow/resources.hpp"
#include "gridflow/sim.hpp"
#include "gridflow/sweep.hpp"
