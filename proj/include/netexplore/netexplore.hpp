#pragma once

// Umbrella header.
#include "netexplore/edge_list.hpp"
#include "netexplore/errors.hpp"
#include "netexplore/exploration.hpp"
#include "netexplore/feature_vector.hpp"
#include "netexplore/features.hpp"
#include "netexplore/generators.hpp"
#include "netexplore/graph.hpp"
#include "netexplore/harness.hpp"
#include "netexplore/knn.hpp"
#include "netexplore/policies.hpp"
#include "netexplore/rng.hpp"
#include "netexplore/sampling.hpp"
