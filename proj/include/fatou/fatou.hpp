#pragma once

// Umbrella header.

#include "fatou/core.hpp"
#include "fatou/xcomplex.hpp"
#include "fatou/multi_index.hpp"
#include "fatou/polynomial.hpp"
#include "fatou/jet.hpp"
#include "fatou/germ.hpp"
#include "fatou/automorphism.hpp"
#include "fatou/maps.hpp"
#include "fatou/random.hpp"
#include "fatou/sequence.hpp"
#include "fatou/factorize.hpp"
#include "fatou/families.hpp"
#include "fatou/affine_orbit.hpp"
#include "fatou/conjugation.hpp"
#include "fatou/filtration.hpp"
#include "fatou/dynamics.hpp"
#include "fatou/render.hpp"
