#pragma once

#include "modeleig/errors.hpp"
#include "modeleig/modelspace.hpp"
#include "modeleig/quadrature.hpp"
#include "modeleig/eigensolve.hpp"
#include "modeleig/bessel.hpp"
#include "modeleig/bounds.hpp"
#include "modeleig/comparison.hpp"
#include "modeleig/physics.hpp"
