#pragma once

// Umbrella header.

#include "graphts/alignment.hpp"
#include "graphts/evaluation.hpp"
#include "graphts/generators.hpp"
#include "graphts/graph.hpp"
#include "graphts/io.hpp"
#include "graphts/latent.hpp"
#include "graphts/matrices.hpp"
#include "graphts/neural_gas.hpp"
#include "graphts/random.hpp"
#include "graphts/regressors.hpp"
#include "graphts/shortest_paths.hpp"
#include "graphts/wilcoxon.hpp"
