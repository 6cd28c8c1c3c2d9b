#pragma once

#include "bskm/csv.hpp"
#include "bskm/dense_kernels.hpp"
#include "bskm/errors.hpp"
#include "bskm/matrix_market.hpp"
#include "bskm/matrix_store.hpp"
#include "bskm/problems.hpp"
#include "bskm/sampling.hpp"
#include "bskm/solvers.hpp"
#include "bskm/theory.hpp"
