#pragma once

// Umbrella header.

#include "mqs/core.hpp"
#include "mqs/lattice.hpp"
#include "mqs/states.hpp"
#include "mqs/additive.hpp"
#include "mqs/norms.hpp"
#include "mqs/schmidt.hpp"
#include "mqs/index_p.hpp"
#include "mqs/parallel.hpp"
#include "mqs/index_q.hpp"
#include "mqs/fit.hpp"
#include "mqs/channels.hpp"
#include "mqs/certifier.hpp"
#include "mqs/serialize.hpp"
#include "mqs/verify.hpp"
#include "mqs/search.hpp"
#include "mqs/scenario.hpp"
