#pragma once

#define MAJOLYAP_VERSION_MAJOR 1
#define MAJOLYAP_VERSION_MINOR 0
#define MAJOLYAP_VERSION_PATCH 0
#define MAJOLYAP_VERSION "1.0.0"
