#pragma once

#define CPFORECAST_VERSION_MAJOR 0
#define CPFORECAST_VERSION_MINOR 1
#define CPFORECAST_VERSION_PATCH 0
#define CPFORECAST_VERSION "0.1.0"
