#pragma once

// Umbrella header: random-walk Metropolis with isotropic variable
// transformations for heavy- and exponential-tailed targets.

#include "morphmc/cauchy_location.hpp"
#include "morphmc/diagnostics.hpp"
#include "morphmc/io.hpp"
#include "morphmc/mlogit.hpp"
#include "morphmc/morph.hpp"
#include "morphmc/numeric.hpp"
#include "morphmc/radial.hpp"
#include "morphmc/rng.hpp"
#include "morphmc/run_config.hpp"
#include "morphmc/sampler.hpp"
#include "morphmc/student_t.hpp"
#include "morphmc/target.hpp"
#include "morphmc/transformed.hpp"
