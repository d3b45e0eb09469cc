// Copyright 2026 The hefl Authors.
// SPDX-License-Identifier: Apache-2.0

// Umbrella header for the leveled CKKS core.
#pragma once

#include "hefl/ckks/context.hpp"
#include "hefl/ckks/encoder.hpp"
#include "hefl/ckks/error.hpp"
#include "hefl/ckks/ntt.hpp"
#include "hefl/ckks/params.hpp"
#include "hefl/ckks/rns_poly.hpp"
#include "hefl/ckks/scheme.hpp"
#include "hefl/ckks/serialize.hpp"
