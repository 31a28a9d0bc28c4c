#pragma once

// Regularized heteroskedastic ordered probit estimation for single-item DIF
// assessment: grouped likelihood, pairwise shrinkage penalties, penalty
// paths, DIF decision rules, item characteristic curves and the supporting
// data plumbing.

#include "hetop/aggregate.hpp"
#include "hetop/bfgs.hpp"
#include "hetop/csv.hpp"
#include "hetop/dif.hpp"
#include "hetop/errors.hpp"
#include "hetop/estimator.hpp"
#include "hetop/icc.hpp"
#include "hetop/likelihood.hpp"
#include "hetop/manifest.hpp"
#include "hetop/normal.hpp"
#include "hetop/parameterization.hpp"
#include "hetop/penalty.hpp"
#include "hetop/serialize.hpp"
#include "hetop/simulate.hpp"
#include "hetop/svg.hpp"
#include "hetop/types.hpp"
