#pragma once

#include "arith.hpp"
#include "constants.hpp"
#include "density.hpp"
#include "divisor_geometry.hpp"
#include "error.hpp"
#include "experiments.hpp"
#include "ext_nat.hpp"
#include "local_laws.hpp"
#include "multiples.hpp"
#include "parallel.hpp"
#include "primes.hpp"
#include "quadrature.hpp"
#include "rng.hpp"
#include "sieve.hpp"
