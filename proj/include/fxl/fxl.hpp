#pragma once

// fxl: algebraic analysis workbench for nonlinear filter generators.

#include "fxl/annihilator.hpp"
#include "fxl/bit_matrix.hpp"
#include "fxl/bool_poly.hpp"
#include "fxl/cipher.hpp"
#include "fxl/errors.hpp"
#include "fxl/estimator.hpp"
#include "fxl/gf128.hpp"
#include "fxl/monomial.hpp"
#include "fxl/truth_table.hpp"
#include "fxl/version.hpp"
#include "fxl/xl.hpp"
