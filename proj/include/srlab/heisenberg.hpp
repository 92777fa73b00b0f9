#pragma once

#include "srlab/heisenberg/cache.hpp"
#include "srlab/heisenberg/eigenfunction.hpp"
#include "srlab/heisenberg/observables.hpp"
#include "srlab/heisenberg/sector.hpp"
#include "srlab/heisenberg/spectrum.hpp"
