#pragma once

#include "risradar/constants.hpp"
#include "risradar/geometry.hpp"
#include "risradar/pattern.hpp"
#include "risradar/link_budget.hpp"
#include "risradar/clutter.hpp"
#include "risradar/detection.hpp"
#include "risradar/timeline.hpp"
#include "risradar/parallel.hpp"
#include "risradar/echo_sim.hpp"
#include "risradar/data_io.hpp"
#include "risradar/config.hpp"
#include "risradar/commands.hpp"
