#pragma once

#define MACROSPIN_VERSION_MAJOR 0
#define MACROSPIN_VERSION_MINOR 1
#define MACROSPIN_VERSION_PATCH 0
#define MACROSPIN_VERSION "0.1.0"

namespace macrospin {
inline const char* version() { return MACROSPIN_VERSION; }
}
