#pragma once

#include "ilw/errors.hpp"
#include "ilw/spectral_core.hpp"
#include "ilw/dispersive_ops.hpp"
#include "ilw/evolution.hpp"
#include "ilw/traveling_waves.hpp"
#include "ilw/lax_functionals.hpp"
#include "ilw/random_field.hpp"
#include "ilw/io.hpp"
#include "ilw/experiments.hpp"
