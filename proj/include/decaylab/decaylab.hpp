#pragma once

#include "decaylab/analyzer.hpp"
#include "decaylab/errors.hpp"
#include "decaylab/kinetics.hpp"
#include "decaylab/montecarlo.hpp"
#include "decaylab/population.hpp"
#include "decaylab/random.hpp"
#include "decaylab/rates.hpp"
#include "decaylab/scenario.hpp"
#include "decaylab/species.hpp"
