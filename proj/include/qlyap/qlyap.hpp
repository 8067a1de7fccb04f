#pragma once

// Umbrella header for the qlyap library.

#include "qlyap/cat.hpp"
#include "qlyap/characteristic.hpp"
#include "qlyap/config.hpp"
#include "qlyap/errors.hpp"
#include "qlyap/floquet.hpp"
#include "qlyap/growth.hpp"
#include "qlyap/io.hpp"
#include "qlyap/kick.hpp"
#include "qlyap/lattice.hpp"
#include "qlyap/observables.hpp"
#include "qlyap/rho0.hpp"
#include "qlyap/runner.hpp"
#include "qlyap/series.hpp"
#include "qlyap/spectral.hpp"
#include "qlyap/trace.hpp"
#include "qlyap/version.hpp"
