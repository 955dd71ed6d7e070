#pragma once

#include "vsp/dyngraph.hpp"

namespace vsp {
}  // namespace vsp
