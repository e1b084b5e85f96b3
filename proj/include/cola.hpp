#pragma once

#include "cola/dataio.hpp"
#include "cola/engine.hpp"
#include "cola/error.hpp"
#include "cola/evaluate.hpp"
#include "cola/model.hpp"
#include "cola/objectives.hpp"
#include "cola/pipeline.hpp"
#include "cola/preprocess.hpp"
#include "cola/subproblem.hpp"
#include "cola/topology.hpp"
#include "cola/trace.hpp"
#include "cola/types.hpp"
