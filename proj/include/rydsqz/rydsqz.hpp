#pragma once

#include "blockade_model.hpp"
#include "config.hpp"
#include "dicke.hpp"
#include "errors.hpp"
#include "feasibility.hpp"
#include "ideal_model.hpp"
#include "integrator.hpp"
#include "lasers.hpp"
#include "numerics.hpp"
#include "observables.hpp"
#include "perturbation_oracle.hpp"
#include "run.hpp"
#include "squeezing_experiment.hpp"
#include "trace.hpp"
