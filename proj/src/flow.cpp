#include "vsp/flow.hpp"
