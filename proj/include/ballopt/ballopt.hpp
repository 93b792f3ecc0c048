#ifndef BALLOPT_BALLOPT_HPP
#define BALLOPT_BALLOPT_HPP

#include "ballopt/core.hpp"
#include "ballopt/discretize.hpp"
#include "ballopt/equivariance.hpp"
#include "ballopt/models.hpp"
#include "ballopt/solver.hpp"
#include "ballopt/verify.hpp"

#endif  // BALLOPT_BALLOPT_HPP
