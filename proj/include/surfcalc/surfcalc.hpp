#pragma once

#include "surfcalc/spectral.hpp"
#include "surfcalc/geometry.hpp"
#include "surfcalc/calculus.hpp"
#include "surfcalc/krylov.hpp"
#include "surfcalc/solvers.hpp"
#include "surfcalc/hodge.hpp"
#include "surfcalc/config.hpp"
#include "surfcalc/export.hpp"
#include "surfcalc/experiments.hpp"
