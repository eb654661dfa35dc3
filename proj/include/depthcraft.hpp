#pragma once

#include "depthcraft/bench.hpp"
#include "depthcraft/classifier.hpp"
#include "depthcraft/datamodel.hpp"
#include "depthcraft/depth/engine.hpp"
#include "depthcraft/error.hpp"
#include "depthcraft/estimators.hpp"
#include "depthcraft/functional.hpp"
#include "depthcraft/lp.hpp"
#include "depthcraft/optim.hpp"
#include "depthcraft/outsiders.hpp"
#include "depthcraft/separators/alpha.hpp"
#include "depthcraft/separators/knn.hpp"
#include "depthcraft/separators/maxdepth.hpp"
#include "depthcraft/separators/polynomial.hpp"
#include "depthcraft/viz.hpp"
