#pragma once

// Umbrella header for the time-dependent isotropic HJB solver library.

#include "hjbmarch/advect1d.hpp"
#include "hjbmarch/config.hpp"
#include "hjbmarch/fast_marching.hpp"
#include "hjbmarch/geometry.hpp"
#include "hjbmarch/heap.hpp"
#include "hjbmarch/local_updates.hpp"
#include "hjbmarch/marchers.hpp"
#include "hjbmarch/metrics.hpp"
#include "hjbmarch/oracle.hpp"
#include "hjbmarch/problem.hpp"
#include "hjbmarch/reproduce.hpp"
#include "hjbmarch/selftest.hpp"
#include "hjbmarch/sweep.hpp"
