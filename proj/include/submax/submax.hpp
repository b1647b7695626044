#pragma once

// Umbrella header.

#include "submax/core.hpp"
#include "submax/experts.hpp"
#include "submax/harness.hpp"
#include "submax/instance.hpp"
#include "submax/matroid.hpp"
#include "submax/multilinear.hpp"
#include "submax/offline.hpp"
#include "submax/online.hpp"
#include "submax/rng.hpp"
