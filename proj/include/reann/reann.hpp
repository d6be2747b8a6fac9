#pragma once

// Umbrella header.

#include "reann/common.hpp"
#include "reann/dataset.hpp"
#include "reann/network.hpp"
#include "reann/trainer.hpp"
#include "reann/clusterer.hpp"
#include "reann/rex.hpp"
#include "reann/render.hpp"
#include "reann/serialize.hpp"
#include "reann/pipeline.hpp"
