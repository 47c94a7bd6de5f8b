#pragma once

// Umbrella header for the numerical core (no JSON dependency).

#include "gqms/types.hpp"
#include "gqms/linalg.hpp"
#include "gqms/symplectic.hpp"
#include "gqms/model.hpp"
#include "gqms/spectral.hpp"
#include "gqms/invariant.hpp"
#include "gqms/dynamics.hpp"
#include "gqms/classical.hpp"
