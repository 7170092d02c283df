#pragma once

#include "lindflow/common.hpp"
#include "lindflow/su_algebra.hpp"
#include "lindflow/bloch_map.hpp"
#include "lindflow/lindblad_core.hpp"
#include "lindflow/bloch_dynamics.hpp"
#include "lindflow/hhd.hpp"
