#pragma once

#include "srlab/geometry/contact.hpp"
#include "srlab/geometry/differencing.hpp"
#include "srlab/geometry/expression.hpp"
#include "srlab/geometry/grid.hpp"
#include "srlab/geometry/laplacian.hpp"
#include "srlab/geometry/models.hpp"
#include "srlab/geometry/pointwise.hpp"
