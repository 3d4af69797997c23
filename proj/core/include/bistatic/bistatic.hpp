#pragma once

#include "bistatic/array_manifold.hpp"
#include "bistatic/beam_covariance.hpp"
#include "bistatic/beamform.hpp"
#include "bistatic/constants.hpp"
#include "bistatic/errors.hpp"
#include "bistatic/fisher.hpp"
#include "bistatic/geometry.hpp"
#include "bistatic/scenario.hpp"
#include "bistatic/sweep.hpp"
#include "bistatic/version.hpp"
