#pragma once

#include "srlab/singular/counting.hpp"
#include "srlab/singular/grushin.hpp"
#include "srlab/singular/martinet.hpp"
