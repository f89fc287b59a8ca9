#pragma once

// Umbrella header for the dual phi-divergence estimation library.

#include "dualdiv/common.hpp"
#include "dualdiv/divergence.hpp"
#include "dualdiv/dual.hpp"
#include "dualdiv/ecdf.hpp"
#include "dualdiv/estimate.hpp"
#include "dualdiv/experiments.hpp"
#include "dualdiv/infer.hpp"
#include "dualdiv/model.hpp"
#include "dualdiv/optimize.hpp"
#include "dualdiv/quadrature.hpp"
#include "dualdiv/rng.hpp"
#include "dualdiv/special.hpp"
