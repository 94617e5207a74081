#pragma once

#include "andic/buzzers.hpp"
#include "andic/concavity.hpp"
#include "andic/continuity.hpp"
#include "andic/discretize.hpp"
#include "andic/errors.hpp"
#include "andic/measures.hpp"
#include "andic/optimize.hpp"
#include "andic/quadrature.hpp"
#include "andic/signals.hpp"
