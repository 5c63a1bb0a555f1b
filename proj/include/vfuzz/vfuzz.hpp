#pragma once

#include "vfuzz/acfg.hpp"
#include "vfuzz/error.hpp"
#include "vfuzz/fuzz.hpp"
#include "vfuzz/gnn.hpp"
#include "vfuzz/report.hpp"
#include "vfuzz/scoring.hpp"
#include "vfuzz/synth.hpp"
#include "vfuzz/vm.hpp"

namespace vfuzz {
inline constexpr const char* kVersion = "0.1.0";
}
