#pragma once

// Umbrella header.

#include "dbtsw/autograd.hpp"
#include "dbtsw/colortransfer.hpp"
#include "dbtsw/error.hpp"
#include "dbtsw/estimators.hpp"
#include "dbtsw/exactot.hpp"
#include "dbtsw/flows.hpp"
#include "dbtsw/image_io.hpp"
#include "dbtsw/measure.hpp"
#include "dbtsw/parallel.hpp"
#include "dbtsw/projection.hpp"
#include "dbtsw/rng.hpp"
#include "dbtsw/serialize.hpp"
#include "dbtsw/transform.hpp"
#include "dbtsw/treemetric.hpp"
#include "dbtsw/trees.hpp"
#include "dbtsw/types.hpp"
#include "dbtsw/version.hpp"
