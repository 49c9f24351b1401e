#pragma once

#include "murmur/arith.hpp"
#include "murmur/check.hpp"
#include "murmur/chebyshev.hpp"
#include "murmur/dirichlet.hpp"
#include "murmur/eigen.hpp"
#include "murmur/errors.hpp"
#include "murmur/murmuration.hpp"
#include "murmur/nu.hpp"
#include "murmur/oracles.hpp"
#include "murmur/parallel.hpp"
#include "murmur/quadrature.hpp"
#include "murmur/special.hpp"
#include "murmur/sum.hpp"
#include "murmur/testfn.hpp"
#include "murmur/trace.hpp"
