#pragma once

#include "affbench/analysis.hpp"
#include "affbench/combine.hpp"
#include "affbench/config.hpp"
#include "affbench/landscape.hpp"
#include "affbench/metrics.hpp"
#include "affbench/optim.hpp"
#include "affbench/rng.hpp"
#include "affbench/runner.hpp"
#include "affbench/suite.hpp"
#include "affbench/trace_io.hpp"
