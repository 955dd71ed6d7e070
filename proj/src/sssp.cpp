#include "vsp/sssp.hpp"
