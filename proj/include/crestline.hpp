#ifndef CRESTLINE_HPP
#define CRESTLINE_HPP

// Umbrella header: steady water waves with vorticity via spatial dynamics --
// stream solutions, the dispersion eigenproblem, the reduced 2N-dimensional
// Hamiltonian system, trajectory integration and symmetry detection, and
// free-surface reconstruction.

#include "crestline/config.hpp"
#include "crestline/dispersion.hpp"
#include "crestline/dynamics.hpp"
#include "crestline/errors.hpp"
#include "crestline/grid.hpp"
#include "crestline/io.hpp"
#include "crestline/pipeline.hpp"
#include "crestline/quadrature.hpp"
#include "crestline/reconstruction.hpp"
#include "crestline/reduction.hpp"
#include "crestline/rng.hpp"
#include "crestline/stream.hpp"
#include "crestline/version.hpp"
#include "crestline/vorticity.hpp"

#endif
