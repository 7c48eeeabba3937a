#ifndef HOPF_HOPF_HPP
#define HOPF_HOPF_HPP

#include "hopf/closest_point.hpp"
#include "hopf/core.hpp"
#include "hopf/level_set.hpp"
#include "hopf/oracles.hpp"
#include "hopf/problem.hpp"
#include "hopf/prox.hpp"
#include "hopf/solver.hpp"
#include "hopf/spectral.hpp"

#endif  // HOPF_HOPF_HPP
