#pragma once

#include "imgreen/acoustic.hpp"
#include "imgreen/boundary_operator.hpp"
#include "imgreen/errors.hpp"
#include "imgreen/forward.hpp"
#include "imgreen/geometry.hpp"
#include "imgreen/identities.hpp"
#include "imgreen/inversion.hpp"
#include "imgreen/lippmann_schwinger.hpp"
#include "imgreen/potentials.hpp"
#include "imgreen/specfun.hpp"
#include "imgreen/spectral.hpp"
#include "imgreen/types.hpp"
