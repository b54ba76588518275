#pragma once

// Umbrella header for the fw-classical library: classical-limit machinery for
// the square-root (Foldy-Wouthuysen) Hamiltonian in one dimension.

#include "fwc/classical.hpp"
#include "fwc/config.hpp"
#include "fwc/errors.hpp"
#include "fwc/harness.hpp"
#include "fwc/io.hpp"
#include "fwc/model.hpp"
#include "fwc/quantum.hpp"
#include "fwc/spin_algebra.hpp"
#include "fwc/spin_dynamics.hpp"
#include "fwc/wkb.hpp"
