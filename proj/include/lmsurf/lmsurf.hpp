#pragma once

#include "split_complex.hpp"
#include "expr.hpp"
#include "parser.hpp"
#include "quadrature.hpp"
#include "weierstrass.hpp"
#include "geometry.hpp"
#include "field.hpp"
#include "canonical.hpp"
#include "equivalence.hpp"
#include "polynomial.hpp"
#include "classify.hpp"
#include "io.hpp"
