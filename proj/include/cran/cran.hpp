#pragma once

// Umbrella header for the uplink C-RAN compress-and-forward rate-region
// library.

#include "cran/equivalence.hpp"
#include "cran/gap.hpp"
#include "cran/gaussinfo.hpp"
#include "cran/io.hpp"
#include "cran/linalg.hpp"
#include "cran/model.hpp"
#include "cran/optimize.hpp"
#include "cran/regions.hpp"
#include "cran/submodular.hpp"
#include "cran/subsets.hpp"
