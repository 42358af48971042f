#pragma once

// Library umbrella header. The command-line layer (gccf/cli.hpp) is separate
// because it pulls in CLI11.

#include "gccf/conformal_mass.hpp"
#include "gccf/core.hpp"
#include "gccf/lattice.hpp"
#include "gccf/pressure.hpp"
#include "gccf/sampler.hpp"
