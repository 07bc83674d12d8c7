// SPDX-License-Identifier: Apache-2.0
#pragma once

// Umbrella header for the qgcm library.

#include "qgcm/config.hpp"
#include "qgcm/estimator.hpp"
#include "qgcm/io.hpp"
#include "qgcm/kernels.hpp"
#include "qgcm/mitigation.hpp"
#include "qgcm/model.hpp"
#include "qgcm/optimize.hpp"
#include "qgcm/qsim.hpp"
#include "qgcm/rng.hpp"
#include "qgcm/solver.hpp"
#include "qgcm/version.hpp"
