#pragma once
// Umbrella header for the exterior-potential reconstruction library.

#include "backus/coeffs.hpp"
#include "backus/field.hpp"
#include "backus/fixpoint.hpp"
#include "backus/io.hpp"
#include "backus/oblique.hpp"
#include "backus/parallel.hpp"
#include "backus/quadrature.hpp"
#include "backus/special.hpp"
#include "backus/spectral.hpp"
#include "backus/version.hpp"
#include "backus/wigner.hpp"
