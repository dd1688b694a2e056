// SPDX-License-Identifier: Apache-2.0
//
// Umbrella header.

#pragma once

#include "eerelay/config.hpp"
#include "eerelay/linalg.hpp"
#include "eerelay/model.hpp"
#include "eerelay/matprops.hpp"
#include "eerelay/objective.hpp"
#include "eerelay/fractional.hpp"
#include "eerelay/solver.hpp"
