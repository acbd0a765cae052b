#pragma once

#include "surge/errors.hpp"
#include "surge/fit.hpp"
#include "surge/gradient_stats.hpp"
#include "surge/harness.hpp"
#include "surge/hessian.hpp"
#include "surge/io.hpp"
#include "surge/laws.hpp"
#include "surge/mc.hpp"
#include "surge/mlp.hpp"
#include "surge/optimizer.hpp"
#include "surge/quadratic.hpp"
#include "surge/rng.hpp"
#include "surge/special.hpp"
#include "surge/svg.hpp"
#include "surge/verify.hpp"
#include "surge/workload.hpp"
