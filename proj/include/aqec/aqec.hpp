#pragma once

#include "aqec/matops.hpp"
#include "aqec/density.hpp"
#include "aqec/channel.hpp"
#include "aqec/random.hpp"
#include "aqec/optimize.hpp"
#include "aqec/fidelity.hpp"
#include "aqec/correctability.hpp"
#include "aqec/recovery.hpp"
#include "aqec/oracles.hpp"
#include "aqec/sweep.hpp"
