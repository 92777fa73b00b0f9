#pragma once

#include "srlab/ergodic/cesaro.hpp"
#include "srlab/ergodic/flow.hpp"
#include "srlab/ergodic/kvn.hpp"
