#pragma once

#include "devices.hpp"
#include "metrics.hpp"
#include "netlist.hpp"
#include "report.hpp"
#include "senseamps.hpp"
#include "solver.hpp"
#include "svg.hpp"
#include "variation.hpp"
