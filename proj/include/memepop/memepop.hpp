#pragma once

#include "memepop/analytic.hpp"
#include "memepop/config.hpp"
#include "memepop/error.hpp"
#include "memepop/eventlog.hpp"
#include "memepop/fitting.hpp"
#include "memepop/io.hpp"
#include "memepop/metrics.hpp"
#include "memepop/optimize.hpp"
#include "memepop/powerlaw.hpp"
#include "memepop/rng.hpp"
#include "memepop/simulator.hpp"
#include "memepop/stats.hpp"

namespace memepop {
inline constexpr const char* kVersion = "0.1.0";
}
