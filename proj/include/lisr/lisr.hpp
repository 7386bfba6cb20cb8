#pragma once

#include "errors.hpp"
#include "harness.hpp"
#include "libsvm.hpp"
#include "linalg.hpp"
#include "logistic.hpp"
#include "oracle.hpp"
#include "quadratic.hpp"
#include "rng.hpp"
#include "solver.hpp"
#include "textio.hpp"
#include "updates.hpp"
