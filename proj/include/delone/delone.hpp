#pragma once

// Umbrella header for the whole library.

#include "delone/error.hpp"
#include "delone/parallel.hpp"
#include "delone/region.hpp"
#include "delone/spatial.hpp"
#include "delone/covering.hpp"
#include "delone/point_set.hpp"
#include "delone/contfrac.hpp"
#include "delone/generators.hpp"
#include "delone/atlas.hpp"
#include "delone/repetitivity.hpp"
#include "delone/ergodic.hpp"
#include "delone/spectral.hpp"
#include "delone/address.hpp"
#include "delone/io.hpp"
#include "delone/config.hpp"
#include "delone/verify.hpp"
