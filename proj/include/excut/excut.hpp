#pragma once

#include "excut/dynamics.hpp"
#include "excut/equilibrium.hpp"
#include "excut/errors.hpp"
#include "excut/harness.hpp"
#include "excut/laws.hpp"
#include "excut/observables.hpp"
#include "excut/oracle.hpp"
#include "excut/parallel.hpp"
#include "excut/piles.hpp"
#include "excut/rng.hpp"
#include "excut/special.hpp"
#include "excut/stats.hpp"
